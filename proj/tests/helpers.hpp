#ifndef COLEP_TESTS_HELPERS_HPP
#define COLEP_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "colep/circuits.hpp"
#include "colep/rng.hpp"
#include "colep/types.hpp"

namespace colep::testing {

// Independent linear-space enumeration of the corrected marginal; the oracle
// the fast path is checked against. Deliberately avoids the library's
// log-space machinery and component factorization.
inline double brute_marginal(const Vec& pi, const std::vector<KnowledgeRule>& rules, int j) {
  const int w = static_cast<int>(pi.size());
  long double num = 0.0L, den = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
    long double prob = 1.0L;
    for (int k = 0; k < w; ++k)
      prob *= (mask >> k) & 1u ? static_cast<long double>(pi[k])
                               : static_cast<long double>(1.0 - pi[k]);
    long double lw = 0.0L;
    for (const auto& r : rules) {
      bool violated = ((mask >> r.antecedent) & 1u) && !((mask >> r.consequent) & 1u);
      if (!violated) lw += static_cast<long double>(r.weight);
    }
    long double term = prob * std::exp(lw);
    den += term;
    if ((mask >> j) & 1u) num += term;
  }
  return static_cast<double>(num / den);
}

inline double brute_colep(const Vec& pi, const KnowledgeBase& kb, int j) {
  double out = 0.0;
  for (int r = 0; r < kb.num_circuits(); ++r)
    out += kb.mixture_weights()[r] *
           brute_marginal(pi, kb.circuits()[static_cast<size_t>(r)].rules(), j);
  return out;
}

// Random homogeneous circuit over `width` variables with weights in
// [0, max_weight].
inline std::vector<KnowledgeRule> random_rules(CounterRng& rng, int width, int max_rules,
                                               double max_weight = 3.0) {
  // random bipartition: low indices may act as antecedents, high as consequents
  int cut = 1 + static_cast<int>(rng.next_unit() * (width - 1));
  std::vector<KnowledgeRule> rules;
  int n_rules = 1 + static_cast<int>(rng.next_unit() * max_rules);
  for (int h = 0; h < n_rules; ++h) {
    int a = static_cast<int>(rng.next_unit() * cut);
    int c = cut + static_cast<int>(rng.next_unit() * (width - cut));
    if (a >= cut) a = cut - 1;
    if (c >= width) c = width - 1;
    rules.push_back({a, c, rng.uniform(0.0, max_weight)});
  }
  return rules;
}

inline Vec random_probs(CounterRng& rng, int width) {
  Vec v(width);
  for (int i = 0; i < width; ++i) v[i] = rng.next_unit();
  return v;
}

}  // namespace colep::testing

#endif

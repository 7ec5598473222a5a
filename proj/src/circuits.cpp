#include "colep/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>

namespace colep {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxEnumeration = 20;  // 2^20 assignments at most, per contract

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }
inline double safe_log1m(double p) { return p < 1.0 ? std::log1p(-p) : kNegInf; }

// Streaming log-sum-exp accumulator tolerant of -inf terms.
class LogSum {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double two_term_log_ratio(double log_num, double log_other) {
  // exp(log_num - logsumexp(log_num, log_other)), exact at the +/-inf edges
  if (log_num == kNegInf) return 0.0;
  if (log_other == kNegInf) return 1.0;
  double m = std::max(log_num, log_other);
  double den = m + std::log(std::exp(log_num - m) + std::exp(log_other - m));
  return std::exp(log_num - den);
}
}  // namespace

CircuitSpec::CircuitSpec(std::vector<KnowledgeRule> rules, LabelSpace space)
    : space_(space), rules_(std::move(rules)) {
  const int w = space_.width();
  roles_.assign(static_cast<size_t>(w), VariableRole::none);
  for (const auto& r : rules_) {
    if (r.antecedent < 0 || r.antecedent >= w || r.consequent < 0 || r.consequent >= w)
      throw StructuralError("CircuitSpec: rule index out of range");
    if (r.antecedent == r.consequent)
      throw StructuralError("CircuitSpec: antecedent equals consequent");
    if (!std::isfinite(r.weight) || r.weight < 0.0)
      throw StructuralError("CircuitSpec: rule weight must be finite and >= 0");
  }
  // Homogeneity: an index may appear only as antecedent or only as consequent.
  for (const auto& r : rules_) {
    auto& a = roles_[static_cast<size_t>(r.antecedent)];
    auto& c = roles_[static_cast<size_t>(r.consequent)];
    if (a == VariableRole::consequence || c == VariableRole::conditional)
      throw StructuralError("CircuitSpec: not a homogeneous circuit (index is both antecedent and consequent)");
    a = VariableRole::conditional;
    c = VariableRole::consequence;
  }

  // Union-find over rule endpoints.
  std::vector<int> parent(static_cast<size_t>(w));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (const auto& r : rules_) {
    int a = find(r.antecedent), c = find(r.consequent);
    if (a != c) parent[static_cast<size_t>(a)] = c;
  }

  comp_id_.assign(static_cast<size_t>(w), -1);
  for (int i = 0; i < w; ++i) {
    int root = find(i);
    if (comp_id_[static_cast<size_t>(root)] < 0) {
      comp_id_[static_cast<size_t>(root)] = static_cast<int>(comp_members_.size());
      comp_members_.emplace_back();
    }
    comp_id_[static_cast<size_t>(i)] = comp_id_[static_cast<size_t>(root)];
    comp_members_[static_cast<size_t>(comp_id_[static_cast<size_t>(i)])].push_back(i);
  }
  comp_rule_ids_.resize(comp_members_.size());
  for (size_t h = 0; h < rules_.size(); ++h) {
    comp_rule_ids_[static_cast<size_t>(comp_id_[static_cast<size_t>(rules_[h].antecedent)])]
        .push_back(static_cast<int>(h));
  }
}

const std::vector<int>& CircuitSpec::component(int index) const {
  return comp_members_.at(static_cast<size_t>(comp_id_.at(static_cast<size_t>(index))));
}

std::vector<int> CircuitSpec::component_neighbors(int index) const {
  std::vector<int> out;
  for (int m : component(index))
    if (m != index) out.push_back(m);
  return out;
}

const std::vector<int>& CircuitSpec::component_rules(int index) const {
  return comp_rule_ids_.at(static_cast<size_t>(comp_id_.at(static_cast<size_t>(index))));
}

double log_factor_value(const Assignment& mu, const CircuitSpec& circuit) {
  if (mu.size() != circuit.label_space().width())
    throw StructuralError("factor_value: assignment width mismatch");
  double lf = 0.0;
  for (const auto& r : circuit.rules()) {
    bool violated = mu[r.antecedent] && !mu[r.consequent];
    if (!violated) lf += r.weight;
  }
  return lf;
}

double factor_value(const Assignment& mu, const CircuitSpec& circuit) {
  return std::exp(log_factor_value(mu, circuit));
}

double pc_marginal(const Vec& pi, const CircuitSpec& circuit, int j) {
  const auto& space = circuit.label_space();
  check_probability_vector(pi, space.width(), "pc_marginal");
  if (j < 0 || j >= space.num_classes)
    throw StructuralError("pc_marginal: class index out of range");

  const std::vector<int> others = circuit.component_neighbors(j);
  const int m = static_cast<int>(others.size());
  if (m + 1 > kMaxEnumeration)
    throw StructuralError("pc_marginal: component of j exceeds the enumeration cutoff");
  if (m == 0) return pi[j];  // no rule couples j to anything

  // Rule endpoints as positions within `others`; -1 marks j itself.
  struct LocalRule {
    int ant_pos, cons_pos;
    double weight;
  };
  std::vector<LocalRule> local;
  local.reserve(circuit.component_rules(j).size());
  auto pos_of = [&](int idx) {
    if (idx == j) return -1;
    auto it = std::lower_bound(others.begin(), others.end(), idx);
    return static_cast<int>(it - others.begin());
  };
  for (int h : circuit.component_rules(j)) {
    const auto& r = circuit.rules()[static_cast<size_t>(h)];
    local.push_back({pos_of(r.antecedent), pos_of(r.consequent), r.weight});
  }

  std::vector<double> log_on(static_cast<size_t>(m)), log_off(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    log_on[static_cast<size_t>(k)] = safe_log(pi[others[static_cast<size_t>(k)]]);
    log_off[static_cast<size_t>(k)] = safe_log1m(pi[others[static_cast<size_t>(k)]]);
  }

  // G(d) = sum over assignments of the component minus j, with mu_j = d.
  LogSum g[2];
  const std::uint32_t limit = 1u << m;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    double lb = 0.0;
    for (int k = 0; k < m; ++k)
      lb += (mask >> k) & 1u ? log_on[static_cast<size_t>(k)] : log_off[static_cast<size_t>(k)];
    if (lb == kNegInf) continue;
    for (int d = 0; d <= 1; ++d) {
      double lf = 0.0;
      for (const auto& r : local) {
        bool ant = r.ant_pos < 0 ? d != 0 : ((mask >> r.ant_pos) & 1u) != 0;
        bool cons = r.cons_pos < 0 ? d != 0 : ((mask >> r.cons_pos) & 1u) != 0;
        if (!(ant && !cons)) lf += r.weight;
      }
      g[d].add(lb + lf);
    }
  }

  double log_num = safe_log(pi[j]) + g[1].value();
  double log_zero = safe_log1m(pi[j]) + g[0].value();
  return two_term_log_ratio(log_num, log_zero);
}

double pc_marginal_oracle(const Vec& pi, const CircuitSpec& circuit, int j) {
  const auto& space = circuit.label_space();
  check_probability_vector(pi, space.width(), "pc_marginal_oracle");
  if (j < 0 || j >= space.num_classes)
    throw StructuralError("pc_marginal_oracle: class index out of range");
  const int w = space.width();
  if (w > kMaxEnumeration)
    throw StructuralError("pc_marginal_oracle: width exceeds the enumeration cutoff");

  std::vector<double> log_on(static_cast<size_t>(w)), log_off(static_cast<size_t>(w));
  for (int k = 0; k < w; ++k) {
    log_on[static_cast<size_t>(k)] = safe_log(pi[k]);
    log_off[static_cast<size_t>(k)] = safe_log1m(pi[k]);
  }

  LogSum num, den;
  const std::uint32_t limit = 1u << w;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    double lb = 0.0;
    for (int k = 0; k < w; ++k)
      lb += (mask >> k) & 1u ? log_on[static_cast<size_t>(k)] : log_off[static_cast<size_t>(k)];
    if (lb == kNegInf) continue;
    double lf = 0.0;
    for (const auto& r : circuit.rules()) {
      bool violated = ((mask >> r.antecedent) & 1u) && !((mask >> r.consequent) & 1u);
      if (!violated) lf += r.weight;
    }
    den.add(lb + lf);
    if ((mask >> j) & 1u) num.add(lb + lf);
  }
  if (den.value() == kNegInf) throw NumericError("pc_marginal_oracle: zero total mass");
  if (num.value() == kNegInf) return 0.0;
  double v = std::exp(num.value() - den.value());
  return v > 1.0 ? 1.0 : v;
}

KnowledgeBase::KnowledgeBase(std::vector<CircuitSpec> circuits, Vec mixture_weights)
    : circuits_(std::move(circuits)), beta_(std::move(mixture_weights)) {
  if (circuits_.empty()) throw StructuralError("KnowledgeBase: needs at least one circuit");
  const auto& ls = circuits_.front().label_space();
  for (const auto& c : circuits_)
    if (c.label_space().num_classes != ls.num_classes ||
        c.label_space().num_concepts != ls.num_concepts)
      throw StructuralError("KnowledgeBase: circuits disagree on the label space");
  if (beta_.size() != static_cast<Eigen::Index>(circuits_.size()))
    throw StructuralError("KnowledgeBase: mixture weight count mismatch");
  double sum = 0.0;
  for (Eigen::Index r = 0; r < beta_.size(); ++r) {
    if (!std::isfinite(beta_[r]) || beta_[r] < 0.0)
      throw StructuralError("KnowledgeBase: mixture weights must be >= 0");
    sum += beta_[r];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw StructuralError("KnowledgeBase: mixture weights must sum to 1");
  beta_ /= sum;
}

double KnowledgeBase::common_rule_weight() const {
  double w = -1.0;
  for (const auto& c : circuits_) {
    for (const auto& r : c.rules()) {
      if (w < 0.0)
        w = r.weight;
      else if (r.weight != w)
        throw StructuralError("KnowledgeBase: heterogeneous rule weights; the utility analysis assumes a fixed w");
    }
  }
  return w < 0.0 ? 0.0 : w;  // empty knowledge base behaves as w = 0
}

double colep_probability(const Vec& pi, const KnowledgeBase& kb, int j) {
  double out = 0.0;
  for (int r = 0; r < kb.num_circuits(); ++r)
    out += kb.mixture_weights()[r] * pc_marginal(pi, kb.circuits()[static_cast<size_t>(r)], j);
  return out;
}

Vec colep_class_probabilities(const Vec& pi, const KnowledgeBase& kb) {
  const int nc = kb.label_space().num_classes;
  Vec out(nc);
  for (int j = 0; j < nc; ++j) out[j] = colep_probability(pi, kb, j);
  return out;
}

Vec estimate_mixture_weights(const std::vector<Vec>& beliefs, const std::vector<int>& labels,
                             const std::vector<CircuitSpec>& circuits) {
  if (beliefs.empty() || beliefs.size() != labels.size())
    throw StructuralError("estimate_mixture_weights: empty or mismatched calibration data");
  if (circuits.empty()) throw StructuralError("estimate_mixture_weights: no circuits");
  const int nc = circuits.front().label_space().num_classes;

  Vec acc = Vec::Zero(static_cast<Eigen::Index>(circuits.size()));
  for (size_t i = 0; i < beliefs.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= nc)
      throw StructuralError("estimate_mixture_weights: label out of range");
    for (size_t r = 0; r < circuits.size(); ++r) {
      int best = 0;
      double best_p = -1.0;
      for (int j = 0; j < nc; ++j) {
        double p = pc_marginal(beliefs[i], circuits[r], j);
        if (p > best_p) {
          best_p = p;
          best = j;
        }
      }
      if (best == labels[i]) acc[static_cast<Eigen::Index>(r)] += 1.0;
    }
  }
  double total = acc.sum();
  if (total <= 0.0)
    return Vec::Constant(static_cast<Eigen::Index>(circuits.size()),
                         1.0 / static_cast<double>(circuits.size()));
  return acc / total;
}

}  // namespace colep

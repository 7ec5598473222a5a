#include "colep/certify.hpp"

#include <algorithm>
#include <cmath>

#include "colep/normal.hpp"

namespace colep {

namespace {
inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }
}

ProbabilityInterval smoothing_bound(double g, const PerturbationBudget& budget) {
  if (!(g >= 0.0 && g <= 1.0)) throw NumericError("smoothing_bound: g outside [0,1]");
  if (budget.delta == 0.0) return {g, g};
  if (g == 0.0) return {0.0, 0.0};
  if (g == 1.0) return {1.0, 1.0};
  double q = normal_quantile(g);
  double r = budget.ratio();
  return {normal_cdf(q - r), normal_cdf(q + r)};
}

double hoeffding_error(long n_samples, double beta) {
  return std::sqrt(std::log(1.0 / beta) / (2.0 * static_cast<double>(n_samples)));
}

double bernstein_error(double variance, long n_samples, double beta) {
  double n = static_cast<double>(n_samples);
  double l = std::log(2.0 / beta);
  return std::sqrt(2.0 * variance * l / n) + 7.0 * l / (3.0 * (n - 1.0));
}

ProbabilityInterval smoothing_bound_with_errors(double mean, double hoef, double bern,
                                                const PerturbationBudget& budget) {
  double lo_in = clamp01(mean - hoef);
  double hi_in = clamp01(mean + hoef);
  double lo = smoothing_bound(lo_in, budget).lower - bern;
  double hi = smoothing_bound(hi_in, budget).upper + bern;
  return {clamp01(lo), clamp01(hi)};
}

ProbabilityInterval smoothing_bound_finite_sample(const MonteCarloEstimate& est,
                                                  const PerturbationBudget& budget) {
  double bh = hoeffding_error(est.n_samples, est.confidence);
  double bb = bernstein_error(est.variance, est.n_samples, est.confidence);
  return smoothing_bound_with_errors(est.mean, bh, bb, budget);
}

IntervalVector smoothing_intervals(const Vec& beliefs, const PerturbationBudget& budget) {
  Vec lo(beliefs.size()), hi(beliefs.size());
  for (Eigen::Index i = 0; i < beliefs.size(); ++i) {
    auto b = smoothing_bound(beliefs[i], budget);
    lo[i] = b.lower;
    hi[i] = b.upper;
  }
  return IntervalVector(std::move(lo), std::move(hi));
}

IntervalVector smoothing_intervals_finite_sample(const Vec& beliefs, const PerturbationBudget& budget,
                                                 long n_mc, double beta) {
  Vec lo(beliefs.size()), hi(beliefs.size());
  for (Eigen::Index i = 0; i < beliefs.size(); ++i) {
    double m = beliefs[i];
    MonteCarloEstimate est(m, m * (1.0 - m), n_mc, beta);
    auto b = smoothing_bound_finite_sample(est, budget);
    lo[i] = b.lower;
    hi[i] = b.upper;
  }
  return IntervalVector(std::move(lo), std::move(hi));
}

std::vector<CornerChoice> monotone_extremizer(const CircuitSpec& circuit, int j, BoundSide side) {
  const int w = circuit.label_space().width();
  if (j < 0 || j >= circuit.label_space().num_classes)
    throw StructuralError("monotone_extremizer: class index out of range");
  std::vector<CornerChoice> out(static_cast<size_t>(w), CornerChoice::irrelevant);
  CornerChoice pick = side == BoundSide::upper ? CornerChoice::upper : CornerChoice::lower;
  for (int m : circuit.component(j)) out[static_cast<size_t>(m)] = pick;
  return out;
}

ProbabilityInterval propagate_bounds(const IntervalVector& iv, const KnowledgeBase& kb, int j) {
  const auto& ls = kb.label_space();
  if (iv.size() != ls.width()) throw StructuralError("propagate_bounds: interval width mismatch");
  if (j < 0 || j >= ls.num_classes)
    throw StructuralError("propagate_bounds: class index out of range");
  double lo = 0.0, hi = 0.0;
  for (int r = 0; r < kb.num_circuits(); ++r) {
    const auto& circuit = kb.circuits()[static_cast<size_t>(r)];
    double beta = kb.mixture_weights()[r];
    lo += beta * pc_marginal(iv.lower, circuit, j);
    hi += beta * pc_marginal(iv.upper, circuit, j);
  }
  return {clamp01(lo), clamp01(hi)};
}

}  // namespace colep

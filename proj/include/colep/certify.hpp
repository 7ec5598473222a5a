#ifndef COLEP_CERTIFY_HPP
#define COLEP_CERTIFY_HPP

#include <cstdint>
#include <vector>

#include "colep/circuits.hpp"
#include "colep/types.hpp"

namespace colep {

// l2 perturbation radius delta against smoothing noise sigma.
struct PerturbationBudget {
  double delta = 0.0;
  double sigma = 1.0;

  PerturbationBudget() = default;
  PerturbationBudget(double d, double s) : delta(d), sigma(s) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw StructuralError("PerturbationBudget: delta must be >= 0");
    if (!(s > 0.0) || !std::isfinite(s)) throw StructuralError("PerturbationBudget: sigma must be > 0");
  }
  double ratio() const { return delta / sigma; }
};

struct ProbabilityInterval {
  double lower = 0.0;
  double upper = 1.0;
};

// Empirical smoothing estimate over n_samples Monte Carlo draws.
struct MonteCarloEstimate {
  double mean = 0.0;      // empirical mean in [0,1]
  double variance = 0.0;  // unbiased empirical variance of the draws
  long n_samples = 2;
  double confidence = 0.001;  // beta

  MonteCarloEstimate() = default;
  MonteCarloEstimate(double m, double v, long n, double beta)
      : mean(m), variance(v), n_samples(n), confidence(beta) {
    if (!(m >= 0.0 && m <= 1.0)) throw NumericError("MonteCarloEstimate: mean outside [0,1]");
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("MonteCarloEstimate: variance must be >= 0");
    if (n < 2) throw StructuralError("MonteCarloEstimate: n_samples must be >= 2");
    if (!(beta > 0.0 && beta <= 0.5))
      throw StructuralError("MonteCarloEstimate: confidence must lie in (0, 0.5]");
  }
};

// Two-sided smoothing bound Phi(Phi^-1(g) -/+ delta/sigma); g in {0,1} is
// degenerate and maps to (g, g).
ProbabilityInterval smoothing_bound(double g, const PerturbationBudget& budget);

double hoeffding_error(long n_samples, double beta);
double bernstein_error(double variance, long n_samples, double beta);

// Smoothing bound widened by explicit Hoeffding/Bernstein terms; the mean is
// shifted by +/-hoef before the probit, the result by -/+bern, then clamped.
ProbabilityInterval smoothing_bound_with_errors(double mean, double hoef, double bern,
                                                const PerturbationBudget& budget);

ProbabilityInterval smoothing_bound_finite_sample(const MonteCarloEstimate& est,
                                                  const PerturbationBudget& budget);

// Per-entry smoothing intervals for a whole belief vector.
IntervalVector smoothing_intervals(const Vec& beliefs, const PerturbationBudget& budget);

// Finite-sample variant; each entry is treated as a MonteCarloEstimate with
// the supplied variance policy (entry mean m -> variance m(1-m) by default).
IntervalVector smoothing_intervals_finite_sample(const Vec& beliefs, const PerturbationBudget& budget,
                                                 long n_mc, double beta);

enum class BoundSide : unsigned char { lower, upper };
enum class CornerChoice : unsigned char { lower, upper, irrelevant };

// Which interval endpoint each variable takes at the corner that extremizes
// the class-j marginal of `circuit`. The marginal is coordinatewise
// non-decreasing (implication couplings are all non-negative), so every
// variable in j's component takes the endpoint named by `side`; variables
// outside the component cannot move the marginal.
std::vector<CornerChoice> monotone_extremizer(const CircuitSpec& circuit, int j, BoundSide side);

// Tight mixture bounds: per circuit the marginal is evaluated at the
// extremizing corner of the box, then combined with the mixture weights.
// For every pi inside the box, L <= colep_probability(pi, kb, j) <= U, with
// equality attained at the all-lower / all-upper corners.
ProbabilityInterval propagate_bounds(const IntervalVector& iv, const KnowledgeBase& kb, int j);

}  // namespace colep

#endif

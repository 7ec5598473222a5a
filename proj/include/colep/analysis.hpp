#ifndef COLEP_ANALYSIS_HPP
#define COLEP_ANALYSIS_HPP

#include <array>
#include <optional>
#include <vector>

#include "colep/circuits.hpp"
#include "colep/simgen.hpp"
#include "colep/types.hpp"

namespace colep {

// Per-index confidence quality (t, z) of the learning heads on one
// distribution: P[pi <= 1-t | truth=0] >= z and P[pi >= t | truth=1] >= z.
struct ModelUtility {
  Vec t;
  Vec z;
};

// {0.5, 0.55, ..., 0.95, 0.99}
Vec default_threshold_grid();

// Per index: picks the grid t maximizing t*z, where z is the smaller of the
// two empirical conditional probabilities; a missing stratum forces z = 0.
ModelUtility estimate_model_utility(const std::vector<Sample>& data, const Vec& t_grid);

// Combined utility of the models and rules coupled to class j in circuit r.
struct RuleUtility {
  double T = 1.0;              // product of t over A_r(j)
  double Z = 1.0;              // product of z over A_r(j)
  std::optional<double> U;     // rule utility; missing when the stratum is empty
  double lambda = 0.0;         // 1/T + e^{-w} - 1
};

RuleUtility rule_utility(const KnowledgeBase& kb, const std::vector<Assignment>& truths,
                         const ModelUtility& model_util, int j, int r, double w);

// Utilities for both mixture components; index 0 = benign, 1 = adversarial.
struct EffectivenessContext {
  std::vector<std::array<RuleUtility, 2>> per_circuit;
  double p_benign = 1.0;
  double w = 0.0;
};

struct Effectiveness {
  double eps0 = 0.0;
  double eps1 = 0.0;
};

// Closed-form correction strengths for one value of pi_j (both mixture
// components weighted by p_D). Referencing a circuit whose U is missing while
// its mixture weight is active is a StructuralError.
Effectiveness reasoning_effectiveness(double pi_j, const EffectivenessContext& ctx,
                                      const KnowledgeBase& kb, int j);

// Per-sample variant used by the Monte Carlo effectiveness check: the
// sample's own origin selects which distribution's utilities apply (weight 1).
Effectiveness reasoning_effectiveness_for_origin(double pi_j, const EffectivenessContext& ctx,
                                                 const KnowledgeBase& kb, int j, Origin origin);

// Measured world utilities: per-index (t, z) for each mixture side plus the
// pooled ground-truth draws feeding the U estimates.
struct UtilityEstimate {
  ModelUtility benign;
  ModelUtility adversarial;
  std::vector<Assignment> truths;
  double w = 0.0;
  double p_benign = 1.0;

  EffectivenessContext context_for_class(const KnowledgeBase& kb, int j) const;
};

UtilityEstimate estimate_utilities(const WorldSpec& world, const KnowledgeBase& kb, long n_samples,
                                   std::uint64_t stream_offset = 11);

enum class CheckStatus : unsigned char { pass, fail, inconclusive };

struct EffectivenessPerClass {
  int cls = 0;
  long n0 = 0, n1 = 0;
  // Y != j side: E[colep] vs E[pi - eps0]
  double lhs0 = 0.0, rhs0 = 0.0, se0 = 0.0;
  // Y == j side: E[colep] vs E[pi + eps1]
  double lhs1 = 0.0, rhs1 = 0.0, se1 = 0.0;
  double mean_eps0 = 0.0, mean_eps1 = 0.0;
  CheckStatus status0 = CheckStatus::inconclusive;
  CheckStatus status1 = CheckStatus::inconclusive;
};

struct EffectivenessReport {
  std::vector<EffectivenessPerClass> per_class;
  bool all_pass = false;
  bool any_inconclusive = false;
};

// Monte Carlo check of the two conditional-expectation inequalities; PASS
// within 3 standard errors, strata below 100 samples are inconclusive.
EffectivenessReport effectiveness_check(const WorldSpec& world, const KnowledgeBase& kb,
                                        long n_samples, long n_utility_samples = 20000);

struct AccuracyBoundPerClass {
  int cls = 0;
  double e0 = 0.0, e1 = 0.0;  // E[colep_j | truth_j = 0 / 1] on the mixture
  double accuracy = 0.0;      // measured 0.5-threshold accuracy of colep_j
  double bound = 0.0;         // exponential lower bound from the measured E's
  bool hypothesis_ok = false;  // e0 < 0.5 < e1
  bool holds = false;
};

struct ComparisonReport {
  long n_trials = 0;
  double win_fraction = 0.0;  // trials where colep adversarial coverage > baseline's
  double mean_coverage_colep = 0.0;
  double mean_coverage_baseline = 0.0;
  double mean_accuracy_delta = 0.0;  // colep minus bare model, mixture distribution
  std::vector<AccuracyBoundPerClass> accuracy_bounds;
  bool accuracy_bounds_hold = false;
};

// Desk-scale analog of the coverage/accuracy superiority claims: repeated
// benign calibration + adversarial testing, plus the accuracy lower bound
// evaluated from measured conditional expectations.
ComparisonReport model_comparisons(const WorldSpec& world, const KnowledgeBase& kb,
                                       long n_cal, long n_adv, long n_trials, double alpha);

}  // namespace colep

#endif

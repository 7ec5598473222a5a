#ifndef COLEP_CONFORMAL_HPP
#define COLEP_CONFORMAL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "colep/certify.hpp"
#include "colep/circuits.hpp"
#include "colep/types.hpp"

namespace colep {

struct CalibrationRecord {
  Vec beliefs;            // width N_c + L
  int label = 0;          // Y_i in [N_c)
  std::optional<double> u;  // per-row randomization draw, when materialized
};

struct IntervalRecord {
  IntervalVector beliefs;
  int label = 0;
  std::optional<double> u;
};

struct CoverageTarget {
  double alpha = 0.1;
  std::optional<Vec> per_class_alpha;  // defaults to uniform alpha

  CoverageTarget() = default;
  explicit CoverageTarget(double a, std::optional<Vec> per_class = std::nullopt)
      : alpha(a), per_class_alpha(std::move(per_class)) {
    if (!(a > 0.0 && a < 1.0)) throw StructuralError("CoverageTarget: alpha must lie in (0,1)");
    if (per_class_alpha) {
      for (Eigen::Index j = 0; j < per_class_alpha->size(); ++j) {
        double aj = (*per_class_alpha)[j];
        if (!(aj > 0.0 && aj < 1.0))
          throw StructuralError("CoverageTarget: per-class alpha must lie in (0,1)");
        if (aj > alpha + 1e-12)
          throw StructuralError("CoverageTarget: per-class alpha exceeds alpha");
      }
    }
  }

  double alpha_for(int j) const {
    return per_class_alpha ? (*per_class_alpha)[j] : alpha;
  }
};

struct PredictionSet {
  std::vector<int> members;        // subset of [N_c), ascending
  Vec per_class_thresholds;        // quantile values used (+inf sentinel possible)

  bool contains(int j) const {
    for (int m : members)
      if (m == j) return true;
    return false;
  }
};

struct CertifiedCoverage {
  Vec tau_per_class;
  double tau = 0.0;
  double finite_sample_tau = 0.0;
};

// Where the conformal u draws come from: the records themselves, or a
// counter-based stream keyed by (seed, sample index, class index).
class UPolicy {
 public:
  static UPolicy from_records() { return UPolicy(true, 0); }
  static UPolicy seeded(std::uint64_t seed) { return UPolicy(false, seed); }

  bool uses_records() const { return from_records_; }
  std::uint64_t seed() const { return seed_; }
  const char* mode_name() const { return from_records_ ? "record" : "seeded"; }

  double value(const std::optional<double>& record_u, long sample_index, int cls) const;

 private:
  UPolicy(bool rec, std::uint64_t seed) : from_records_(rec), seed_(seed) {}
  bool from_records_;
  std::uint64_t seed_;
};

// APS non-conformity score over N_c class probabilities: probability mass
// strictly above the candidate's, plus u times the candidate's own mass.
double aps_score(const Vec& class_probs, int y, double u);

// Binary-label APS specialization for one class head.
double binary_score(double p, bool matches, double u);

// Score at the interval endpoint least favorable to coverage; dominates
// binary_score(p, ...) for every p in [lo, hi].
double worst_case_score(double lo, double hi, bool matches, double u);

// k-th smallest score with k = ceil(level * (n+1)); +inf when k > n.
double conformal_quantile(const std::vector<double>& scores, double level);

// Per-class binary score lists over the calibration set (clean path).
std::vector<std::vector<double>> calibration_class_scores(const std::vector<CalibrationRecord>& calib,
                                                          const KnowledgeBase& kb,
                                                          const UPolicy& upolicy);

// Worst-case variant: scores computed from propagated interval bounds.
std::vector<std::vector<double>> calibration_class_scores_certified(
    const std::vector<IntervalRecord>& calib, const KnowledgeBase& kb, const UPolicy& upolicy);

// Per-class thresholds Q_{1 - alpha_j + level_shift}; level_shift is the
// finite-sample 2*beta bump (StructuralError when a level reaches 1).
Vec thresholds_from_scores(const std::vector<std::vector<double>>& scores,
                           const CoverageTarget& target, double level_shift = 0.0);

// Membership test of every class given precomputed thresholds; test_us holds
// one u per class for the test sample.
PredictionSet predict_with_thresholds(const Vec& test_beliefs, const KnowledgeBase& kb,
                                      const Vec& thresholds, const Vec& test_us);

// One-shot forms matching the operation contracts.
PredictionSet predict_set(const Vec& test_beliefs, const std::vector<CalibrationRecord>& calib,
                          const KnowledgeBase& kb, const CoverageTarget& target,
                          const UPolicy& upolicy, const Vec& test_us);

PredictionSet predict_set_certified(const Vec& test_beliefs, const std::vector<IntervalRecord>& calib,
                                    const KnowledgeBase& kb, const CoverageTarget& target,
                                    const UPolicy& upolicy, const Vec& test_us,
                                    std::optional<double> fs_beta = std::nullopt);

// Worst-case coverage of the standard prediction set: per class, the largest
// tau whose worst-score quantile stays below the clean threshold.
CertifiedCoverage certified_coverage(const std::vector<std::vector<double>>& clean_scores,
                                     const std::vector<std::vector<double>>& worst_scores,
                                     const CoverageTarget& target);

// Massart-corrected lower bound on coverage for a calibration set of size n.
double finite_sample_coverage(double min_tau, long n_cal);

// Plain multiclass APS baseline (no reasoning component).
double aps_threshold(const std::vector<CalibrationRecord>& calib, int num_classes, double alpha,
                     const UPolicy& upolicy);
std::vector<int> aps_predict(const Vec& class_probs, double threshold, double u);

}  // namespace colep

#endif

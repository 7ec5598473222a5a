#include "colep/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colep/parallel.hpp"
#include "colep/rng.hpp"

namespace colep {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
// Stream salts keeping calibration u's, test u's and the baseline APS u's on
// disjoint counter-based lanes of the same seed.
constexpr std::uint64_t kStreamU = 0x75ull;

inline void check_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw NumericError("u draw outside [0,1]");
}
}  // namespace

double UPolicy::value(const std::optional<double>& record_u, long sample_index, int cls) const {
  if (from_records_) {
    if (!record_u) throw StructuralError("UPolicy: record is missing its u draw");
    check_u(*record_u);
    return *record_u;
  }
  return uniform_at(seed_, kStreamU, static_cast<std::uint64_t>(sample_index),
                    static_cast<std::uint64_t>(static_cast<long>(cls) + 1));
}

double aps_score(const Vec& class_probs, int y, double u) {
  if (y < 0 || y >= class_probs.size()) throw StructuralError("aps_score: label out of range");
  check_u(u);
  double py = class_probs[y];
  double s = py * u;
  for (Eigen::Index k = 0; k < class_probs.size(); ++k)
    if (class_probs[k] > py) s += class_probs[k];
  return s;
}

double binary_score(double p, bool matches, double u) {
  check_u(u);
  return matches ? 1.0 - p + u * p : p + u * (1.0 - p);
}

double worst_case_score(double lo, double hi, bool matches, double u) {
  if (lo > hi) throw StructuralError("worst_case_score: lower exceeds upper");
  check_u(u);
  return matches ? 1.0 - lo + u * lo : hi + u * (1.0 - hi);
}

double conformal_quantile(const std::vector<double>& scores, double level) {
  if (scores.empty()) throw StructuralError("conformal_quantile: empty score list");
  const long n = static_cast<long>(scores.size());
  // ceil with a one-nano guard so exactly-integral ranks survive fp dust
  long k = static_cast<long>(std::ceil(level * static_cast<double>(n + 1) - 1e-9));
  if (k > n) return kInf;
  if (k < 1) k = 1;
  std::vector<double> sorted(scores);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[static_cast<size_t>(k - 1)];
}

std::vector<std::vector<double>> calibration_class_scores(const std::vector<CalibrationRecord>& calib,
                                                          const KnowledgeBase& kb,
                                                          const UPolicy& upolicy) {
  if (calib.empty()) throw StructuralError("calibration set is empty");
  const int nc = kb.label_space().num_classes;
  const long n = static_cast<long>(calib.size());
  std::vector<std::vector<double>> scores(static_cast<size_t>(nc),
                                          std::vector<double>(static_cast<size_t>(n)));
  parallel_for(n, [&](long i) {
    const auto& rec = calib[static_cast<size_t>(i)];
    if (rec.label < 0 || rec.label >= nc) throw StructuralError("calibration label out of range");
    for (int j = 0; j < nc; ++j) {
      double p = colep_probability(rec.beliefs, kb, j);
      double u = upolicy.value(rec.u, i, j);
      scores[static_cast<size_t>(j)][static_cast<size_t>(i)] =
          binary_score(p, rec.label == j, u);
    }
  });
  return scores;
}

std::vector<std::vector<double>> calibration_class_scores_certified(
    const std::vector<IntervalRecord>& calib, const KnowledgeBase& kb, const UPolicy& upolicy) {
  if (calib.empty()) throw StructuralError("calibration set is empty");
  const int nc = kb.label_space().num_classes;
  const long n = static_cast<long>(calib.size());
  std::vector<std::vector<double>> scores(static_cast<size_t>(nc),
                                          std::vector<double>(static_cast<size_t>(n)));
  parallel_for(n, [&](long i) {
    const auto& rec = calib[static_cast<size_t>(i)];
    if (rec.label < 0 || rec.label >= nc) throw StructuralError("calibration label out of range");
    for (int j = 0; j < nc; ++j) {
      auto bound = propagate_bounds(rec.beliefs, kb, j);
      double u = upolicy.value(rec.u, i, j);
      scores[static_cast<size_t>(j)][static_cast<size_t>(i)] =
          worst_case_score(bound.lower, bound.upper, rec.label == j, u);
    }
  });
  return scores;
}

Vec thresholds_from_scores(const std::vector<std::vector<double>>& scores,
                           const CoverageTarget& target, double level_shift) {
  const int nc = static_cast<int>(scores.size());
  Vec thresholds(nc);
  for (int j = 0; j < nc; ++j) {
    double level = 1.0 - target.alpha_for(j) + level_shift;
    if (level >= 1.0)
      throw StructuralError("thresholds_from_scores: quantile level 1-alpha+2beta reaches 1");
    thresholds[j] = conformal_quantile(scores[static_cast<size_t>(j)], level);
  }
  return thresholds;
}

PredictionSet predict_with_thresholds(const Vec& test_beliefs, const KnowledgeBase& kb,
                                      const Vec& thresholds, const Vec& test_us) {
  const int nc = kb.label_space().num_classes;
  if (thresholds.size() != nc || test_us.size() != nc)
    throw StructuralError("predict_with_thresholds: per-class width mismatch");
  PredictionSet out;
  out.per_class_thresholds = thresholds;
  for (int j = 0; j < nc; ++j) {
    double p = colep_probability(test_beliefs, kb, j);
    double s = binary_score(p, true, test_us[j]);
    if (s <= thresholds[j]) out.members.push_back(j);
  }
  return out;
}

PredictionSet predict_set(const Vec& test_beliefs, const std::vector<CalibrationRecord>& calib,
                          const KnowledgeBase& kb, const CoverageTarget& target,
                          const UPolicy& upolicy, const Vec& test_us) {
  auto scores = calibration_class_scores(calib, kb, upolicy);
  Vec thresholds = thresholds_from_scores(scores, target);
  return predict_with_thresholds(test_beliefs, kb, thresholds, test_us);
}

PredictionSet predict_set_certified(const Vec& test_beliefs, const std::vector<IntervalRecord>& calib,
                                    const KnowledgeBase& kb, const CoverageTarget& target,
                                    const UPolicy& upolicy, const Vec& test_us,
                                    std::optional<double> fs_beta) {
  double shift = 0.0;
  if (fs_beta) {
    if (!(*fs_beta > 0.0)) throw StructuralError("predict_set_certified: fs_beta must be > 0");
    shift = 2.0 * *fs_beta;
  }
  auto scores = calibration_class_scores_certified(calib, kb, upolicy);
  Vec thresholds = thresholds_from_scores(scores, target, shift);
  return predict_with_thresholds(test_beliefs, kb, thresholds, test_us);
}

CertifiedCoverage certified_coverage(const std::vector<std::vector<double>>& clean_scores,
                                     const std::vector<std::vector<double>>& worst_scores,
                                     const CoverageTarget& target) {
  if (clean_scores.size() != worst_scores.size() || clean_scores.empty())
    throw StructuralError("certified_coverage: per-class score lists disagree");
  const int nc = static_cast<int>(clean_scores.size());
  const long n = static_cast<long>(clean_scores.front().size());
  CertifiedCoverage out;
  out.tau_per_class = Vec(nc);
  for (int j = 0; j < nc; ++j) {
    const auto& clean = clean_scores[static_cast<size_t>(j)];
    const auto& worst = worst_scores[static_cast<size_t>(j)];
    if (static_cast<long>(clean.size()) != n || static_cast<long>(worst.size()) != n)
      throw StructuralError("certified_coverage: score list lengths disagree");
    double q = conformal_quantile(clean, 1.0 - target.alpha_for(j));
    long m = 0;
    for (double s : worst)
      if (s <= q) ++m;
    out.tau_per_class[j] = static_cast<double>(m) / static_cast<double>(n + 1);
  }
  out.tau = out.tau_per_class.minCoeff();
  out.finite_sample_tau = finite_sample_coverage(out.tau, n);
  return out;
}

double finite_sample_coverage(double min_tau, long n_cal) {
  if (n_cal < 1) throw StructuralError("finite_sample_coverage: n_cal must be >= 1");
  double n = static_cast<double>(n_cal);
  double c = std::sqrt(std::log(2.0) / 2.0) +
             std::sqrt(2.0) / (4.0 * std::sqrt(std::log(2.0)) + 8.0 / kPi);
  double v = (1.0 + 1.0 / n) * min_tau - c / std::sqrt(n);
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

double aps_threshold(const std::vector<CalibrationRecord>& calib, int num_classes, double alpha,
                     const UPolicy& upolicy) {
  if (calib.empty()) throw StructuralError("aps_threshold: calibration set is empty");
  std::vector<double> scores(calib.size());
  for (size_t i = 0; i < calib.size(); ++i) {
    const auto& rec = calib[i];
    Vec head = rec.beliefs.head(num_classes);
    double u = upolicy.value(rec.u, static_cast<long>(i), -1);
    scores[i] = aps_score(head, rec.label, u);
  }
  return conformal_quantile(scores, 1.0 - alpha);
}

std::vector<int> aps_predict(const Vec& class_probs, double threshold, double u) {
  std::vector<int> out;
  for (int y = 0; y < class_probs.size(); ++y)
    if (aps_score(class_probs, y, u) <= threshold) out.push_back(y);
  return out;
}

}  // namespace colep

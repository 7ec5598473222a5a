#ifndef COLEP_TYPES_HPP
#define COLEP_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace colep {

using Vec = Eigen::ArrayXd;
using BoolVec = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Malformed structures, widths, configs.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite or out-of-domain numeric inputs.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// N_c class bits followed by L concept bits; j_all in [0, width) addresses
// the concatenation, concept l lives at index num_classes + l.
struct LabelSpace {
  int num_classes = 0;
  int num_concepts = 0;

  LabelSpace() = default;
  LabelSpace(int classes, int concepts) : num_classes(classes), num_concepts(concepts) {
    if (classes < 1) throw StructuralError("LabelSpace: num_classes must be >= 1");
    if (concepts < 0) throw StructuralError("LabelSpace: num_concepts must be >= 0");
  }

  int width() const { return num_classes + num_concepts; }
  int concept_index(int l) const { return num_classes + l; }
  bool is_class(int j_all) const { return j_all >= 0 && j_all < num_classes; }
};

// Single-literal implication antecedent => consequent over [0, width).
struct KnowledgeRule {
  int antecedent = 0;
  int consequent = 0;
  double weight = 0.0;
};

using Assignment = BoolVec;

// Entrywise probability box, lower <= upper, both in [0,1].
struct IntervalVector {
  Vec lower;
  Vec upper;

  IntervalVector() = default;
  IntervalVector(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size())
      throw StructuralError("IntervalVector: lower/upper width mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
        throw NumericError("IntervalVector: non-finite bound");
      if (lower[i] < 0.0 || upper[i] > 1.0 || lower[i] > upper[i])
        throw StructuralError("IntervalVector: bounds must satisfy 0 <= lower <= upper <= 1");
    }
  }

  static IntervalVector degenerate(const Vec& point) { return IntervalVector(point, point); }

  Eigen::Index size() const { return lower.size(); }
};

inline void check_probability_vector(const Vec& pi, int expected_width, const char* what) {
  if (pi.size() != expected_width)
    throw StructuralError(std::string(what) + ": width mismatch");
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (!std::isfinite(pi[i])) throw NumericError(std::string(what) + ": non-finite entry");
    if (pi[i] < 0.0 || pi[i] > 1.0)
      throw NumericError(std::string(what) + ": entry outside [0,1]");
  }
}

}  // namespace colep

#endif

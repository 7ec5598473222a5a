#ifndef COLEP_CIRCUITS_HPP
#define COLEP_CIRCUITS_HPP

#include <vector>

#include "colep/types.hpp"

namespace colep {

enum class VariableRole : unsigned char { none, conditional, consequence };

// One homogeneous logic circuit: a weighted set of single-literal implication
// rules whose antecedent and consequent index sets are disjoint. The rule
// graph (edge per rule) and its connected components are cached at
// construction; marginals factor over those components.
class CircuitSpec {
 public:
  CircuitSpec(std::vector<KnowledgeRule> rules, LabelSpace space);

  const LabelSpace& label_space() const { return space_; }
  const std::vector<KnowledgeRule>& rules() const { return rules_; }

  VariableRole role(int index) const { return roles_.at(static_cast<size_t>(index)); }

  // Members of the connected component containing `index`, sorted, including
  // `index` itself (singleton when no rule touches it).
  const std::vector<int>& component(int index) const;

  // A_r(index): the component minus `index` itself.
  std::vector<int> component_neighbors(int index) const;

  // Rule indices whose endpoints lie in component(index).
  const std::vector<int>& component_rules(int index) const;

  bool touches(int index) const { return role(index) != VariableRole::none; }

 private:
  LabelSpace space_;
  std::vector<KnowledgeRule> rules_;
  std::vector<VariableRole> roles_;
  std::vector<int> comp_id_;
  std::vector<std::vector<int>> comp_members_;
  std::vector<std::vector<int>> comp_rule_ids_;
};

// log F(mu): sum of weights of satisfied rules; a rule is violated only when
// its antecedent bit is 1 and its consequent bit is 0.
double log_factor_value(const Assignment& mu, const CircuitSpec& circuit);
double factor_value(const Assignment& mu, const CircuitSpec& circuit);

// Exact class marginal of the circuit-corrected joint. Fast path: enumerates
// only the component of j (guard: |A_r(j)|+1 <= 20, StructuralError beyond).
double pc_marginal(const Vec& pi, const CircuitSpec& circuit, int j);

// Full 2^(N_c+L) enumeration; independent of the component factorization.
// Permitted only for width <= 20.
double pc_marginal_oracle(const Vec& pi, const CircuitSpec& circuit, int j);

// Mixture of R circuits with convex coefficients beta.
class KnowledgeBase {
 public:
  KnowledgeBase(std::vector<CircuitSpec> circuits, Vec mixture_weights);

  const std::vector<CircuitSpec>& circuits() const { return circuits_; }
  const Vec& mixture_weights() const { return beta_; }
  const LabelSpace& label_space() const { return circuits_.front().label_space(); }
  int num_circuits() const { return static_cast<int>(circuits_.size()); }

  // Common rule weight across every circuit, or StructuralError when rules
  // carry heterogeneous weights (the utility diagnostics assume a fixed w).
  double common_rule_weight() const;

 private:
  std::vector<CircuitSpec> circuits_;
  Vec beta_;
};

double colep_probability(const Vec& pi, const KnowledgeBase& kb, int j);

// Marginals for all classes j in [N_c].
Vec colep_class_probabilities(const Vec& pi, const KnowledgeBase& kb);

// beta_r proportional to each circuit's top-1 accuracy on held-out data;
// uniform fallback when every circuit scores zero.
Vec estimate_mixture_weights(const std::vector<Vec>& beliefs, const std::vector<int>& labels,
                             const std::vector<CircuitSpec>& circuits);

}  // namespace colep

#endif

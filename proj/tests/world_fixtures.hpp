#ifndef COLEP_TESTS_WORLD_FIXTURES_HPP
#define COLEP_TESTS_WORLD_FIXTURES_HPP

#include "colep/circuits.hpp"
#include "colep/simgen.hpp"

namespace colep::testing {

// Identity-concept world: class j carries concept j, one preventive and one
// permissive circuit pairing them.
inline WorldSpec identity_world(int num_classes, double t, double z, double flip,
                                double p_adversarial, std::uint64_t seed,
                                double t_adv = -1.0, double z_adv = -1.0) {
  WorldSpec w;
  w.label_space = LabelSpace(num_classes, num_classes);
  w.class_priors = Vec::Constant(num_classes, 1.0 / num_classes);
  for (int c = 0; c < num_classes; ++c) {
    BoolVec row = BoolVec::Constant(num_classes, false);
    row[c] = true;
    w.concept_map.push_back(row);
  }
  w.concept_flip_prob = Vec::Constant(num_classes, flip);
  w.benign_noise = NoiseSpec::uniform(w.label_space, t, z);
  w.adversarial_noise = NoiseSpec::class_attack(w.label_space, t_adv > 0 ? t_adv : t,
                                                z_adv > 0 ? z_adv : z);
  w.p_adversarial = p_adversarial;
  w.seed = seed;
  return w;
}

inline KnowledgeBase identity_kb(int num_classes, double weight) {
  LabelSpace ls(num_classes, num_classes);
  std::vector<KnowledgeRule> preventive, permissive;
  for (int j = 0; j < num_classes; ++j) {
    preventive.push_back({j, num_classes + j, weight});
    permissive.push_back({num_classes + j, j, weight});
  }
  Vec beta(2);
  beta << 0.5, 0.5;
  return KnowledgeBase({CircuitSpec(preventive, ls), CircuitSpec(permissive, ls)}, beta);
}

inline KnowledgeBase trivial_kb(int num_classes, int num_concepts) {
  Vec beta(1);
  beta << 1.0;
  return KnowledgeBase({CircuitSpec({}, LabelSpace(num_classes, num_concepts))}, beta);
}

}  // namespace colep::testing

#endif

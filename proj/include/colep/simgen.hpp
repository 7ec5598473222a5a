#ifndef COLEP_SIMGEN_HPP
#define COLEP_SIMGEN_HPP

#include <cstdint>
#include <vector>

#include "colep/certify.hpp"
#include "colep/circuits.hpp"
#include "colep/types.hpp"

namespace colep {

enum class Origin : unsigned char { benign, adversarial };

// Per-index confidence shaping. With ground-truth bit 1 the confidence is a
// Beta(a,1) draw with a chosen so P[conf >= t] = z exactly; bit 0 mirrors the
// draw to 1-conf. wrong_side flips which side the draw lands on, modelling a
// confidently wrong (attacked) head.
struct NoiseSpec {
  Vec t;
  Vec z;
  BoolVec wrong_side;

  static NoiseSpec uniform(const LabelSpace& ls, double t, double z, bool wrong = false);
  // Attacked class heads, clean concept heads: the standard adversarial shape.
  static NoiseSpec class_attack(const LabelSpace& ls, double t, double z);

  void validate(const LabelSpace& ls) const;
};

struct WorldSpec {
  LabelSpace label_space;
  Vec class_priors;                  // N_c entries, sums to 1
  std::vector<BoolVec> concept_map;  // per class: L concept truth bits
  Vec concept_flip_prob;             // L entries in [0,1]
  NoiseSpec benign_noise;
  NoiseSpec adversarial_noise;
  double p_adversarial = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sample {
  Assignment truth;  // width N_c + L, exactly one class bit set
  Vec beliefs;
  Origin origin = Origin::benign;

  int true_class() const;
};

// Deterministic given (spec, n, stream_offset); per-sample counter-based
// streams, so the i-th sample is identical regardless of thread count.
std::vector<Sample> generate(const WorldSpec& spec, long n, std::uint64_t stream_offset = 0);

// Strongest admissible attacker: moves every entry that the true class's
// marginal depends on to the interval endpoint minimizing that marginal
// (the marginal is coordinatewise non-decreasing), leaving untouched entries
// at their observed value. Output stays inside the smoothing intervals.
Vec interval_adversary(const Sample& sample, const PerturbationBudget& budget,
                       const KnowledgeBase& kb);

// Same attack given only the observed beliefs and the true class label.
Vec interval_adversary(const Vec& beliefs, int true_class, const PerturbationBudget& budget,
                       const KnowledgeBase& kb);

// Attack against the plain multiclass APS baseline: competing class heads go
// to their upper endpoints and the true head to whichever of its endpoints
// inflates the realized APS score more (u known to the attacker). Admissible
// by construction; used by the simulation driver, not by any certificate.
Vec aps_interval_adversary(const Vec& beliefs, int true_class, const PerturbationBudget& budget,
                           int num_classes, double u);

}  // namespace colep

#endif

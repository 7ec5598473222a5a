#include "colep/simgen.hpp"

#include <cmath>
#include <limits>

#include "colep/parallel.hpp"
#include "colep/rng.hpp"

namespace colep {

namespace {
// Sample streams live far apart per dataset so cal/test/trial draws never
// collide for n below 2^40.
constexpr std::uint64_t kSampleStreamBase = 0x53414D50ull;
constexpr std::uint64_t kOffsetStride = 1ull << 40;

double beta_shape(double t, double z) {
  // P[X <= t] = t^a = 1 - z  =>  a = log(1-z)/log(t); t or z at 1 degenerates
  // to the point mass at 1.
  if (t >= 1.0 || z >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(-z) / std::log(t);
}
}  // namespace

NoiseSpec NoiseSpec::uniform(const LabelSpace& ls, double t, double z, bool wrong) {
  NoiseSpec n;
  n.t = Vec::Constant(ls.width(), t);
  n.z = Vec::Constant(ls.width(), z);
  n.wrong_side = BoolVec::Constant(ls.width(), wrong);
  return n;
}

NoiseSpec NoiseSpec::class_attack(const LabelSpace& ls, double t, double z) {
  NoiseSpec n = uniform(ls, t, z, false);
  for (int j = 0; j < ls.num_classes; ++j) n.wrong_side[j] = true;
  return n;
}

void NoiseSpec::validate(const LabelSpace& ls) const {
  if (t.size() != ls.width() || z.size() != ls.width() || wrong_side.size() != ls.width())
    throw StructuralError("NoiseSpec: width mismatch");
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0 && t[i] <= 1.0)) throw StructuralError("NoiseSpec: t must lie in (0,1]");
    if (!(z[i] > 0.0 && z[i] <= 1.0)) throw StructuralError("NoiseSpec: z must lie in (0,1]");
  }
}

void WorldSpec::validate() const {
  const int nc = label_space.num_classes;
  const int l = label_space.num_concepts;
  if (class_priors.size() != nc) throw StructuralError("WorldSpec: prior width mismatch");
  double s = 0.0;
  for (Eigen::Index j = 0; j < class_priors.size(); ++j) {
    if (!(class_priors[j] >= 0.0)) throw StructuralError("WorldSpec: negative prior");
    s += class_priors[j];
  }
  if (std::abs(s - 1.0) > 1e-9) throw StructuralError("WorldSpec: priors must sum to 1");
  if (static_cast<int>(concept_map.size()) != nc)
    throw StructuralError("WorldSpec: concept_map needs one row per class");
  for (const auto& row : concept_map)
    if (row.size() != l) throw StructuralError("WorldSpec: concept_map row width mismatch");
  if (concept_flip_prob.size() != l) throw StructuralError("WorldSpec: flip prob width mismatch");
  for (Eigen::Index i = 0; i < concept_flip_prob.size(); ++i)
    if (!(concept_flip_prob[i] >= 0.0 && concept_flip_prob[i] <= 1.0))
      throw StructuralError("WorldSpec: flip probability outside [0,1]");
  if (!(p_adversarial >= 0.0 && p_adversarial <= 1.0))
    throw StructuralError("WorldSpec: p_adversarial outside [0,1]");
  benign_noise.validate(label_space);
  adversarial_noise.validate(label_space);
}

int Sample::true_class() const {
  for (Eigen::Index j = 0; j < truth.size(); ++j)
    if (truth[j]) return static_cast<int>(j);
  throw StructuralError("Sample: no class bit set");
}

std::vector<Sample> generate(const WorldSpec& spec, long n, std::uint64_t stream_offset) {
  if (n < 1) throw StructuralError("generate: n must be >= 1");
  spec.validate();
  const auto& ls = spec.label_space;
  const int w = ls.width();

  std::vector<Sample> out(static_cast<size_t>(n));
  parallel_for(n, [&](long i) {
    CounterRng rng(spec.seed, kSampleStreamBase + stream_offset * kOffsetStride +
                                  static_cast<std::uint64_t>(i));
    Sample& s = out[static_cast<size_t>(i)];
    s.origin = rng.bernoulli(spec.p_adversarial) ? Origin::adversarial : Origin::benign;
    int y = rng.categorical(spec.class_priors);

    s.truth = Assignment::Constant(w, false);
    s.truth[y] = true;
    for (int l = 0; l < ls.num_concepts; ++l) {
      bool bit = spec.concept_map[static_cast<size_t>(y)][l];
      if (rng.bernoulli(spec.concept_flip_prob[l])) bit = !bit;
      s.truth[ls.concept_index(l)] = bit;
    }

    const NoiseSpec& noise =
        s.origin == Origin::adversarial ? spec.adversarial_noise : spec.benign_noise;
    s.beliefs = Vec(w);
    for (int idx = 0; idx < w; ++idx) {
      double x = rng.power_beta(beta_shape(noise.t[idx], noise.z[idx]));
      bool high = s.truth[idx] != noise.wrong_side[idx];
      s.beliefs[idx] = high ? x : 1.0 - x;
    }
  });
  return out;
}

Vec interval_adversary(const Sample& sample, const PerturbationBudget& budget,
                       const KnowledgeBase& kb) {
  return interval_adversary(sample.beliefs, sample.true_class(), budget, kb);
}

Vec interval_adversary(const Vec& beliefs, int true_class, const PerturbationBudget& budget,
                       const KnowledgeBase& kb) {
  if (beliefs.size() != kb.label_space().width())
    throw StructuralError("interval_adversary: width mismatch");
  if (true_class < 0 || true_class >= kb.label_space().num_classes)
    throw StructuralError("interval_adversary: class index out of range");
  if (budget.delta == 0.0) return beliefs;
  IntervalVector box = smoothing_intervals(beliefs, budget);
  Vec adv = beliefs;
  for (const auto& circuit : kb.circuits()) {
    auto corner = monotone_extremizer(circuit, true_class, BoundSide::lower);
    for (size_t idx = 0; idx < corner.size(); ++idx)
      if (corner[idx] == CornerChoice::lower)
        adv[static_cast<Eigen::Index>(idx)] = box.lower[static_cast<Eigen::Index>(idx)];
  }
  return adv;
}

Vec aps_interval_adversary(const Vec& beliefs, int true_class, const PerturbationBudget& budget,
                           int num_classes, double u) {
  if (true_class < 0 || true_class >= num_classes)
    throw StructuralError("aps_interval_adversary: class index out of range");
  if (budget.delta == 0.0) return beliefs;
  IntervalVector box = smoothing_intervals(beliefs, budget);
  Vec adv = beliefs;
  for (int k = 0; k < num_classes; ++k)
    if (k != true_class) adv[k] = box.upper[k];
  auto score_with = [&](double head) {
    double s = head * u;
    for (int k = 0; k < num_classes; ++k)
      if (k != true_class && adv[k] > head) s += adv[k];
    return s;
  };
  adv[true_class] = score_with(box.lower[true_class]) >= score_with(box.upper[true_class])
                        ? box.lower[true_class]
                        : box.upper[true_class];
  return adv;
}

}  // namespace colep

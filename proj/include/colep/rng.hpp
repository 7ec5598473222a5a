#ifndef COLEP_RNG_HPP
#define COLEP_RNG_HPP

#include <cmath>
#include <cstdint>

#include "colep/types.hpp"

namespace colep {

// splitmix64 finalizer; all randomness in the artifact flows through this so
// results are bit-identical across platforms and thread counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (0xD2B74407B1CE6E93ull * (stream + 1)));
}

// Counter-based stream: the n-th draw depends only on (seed, stream, n).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : state_(stream_key(seed, stream)) {}

  std::uint64_t next_u64() { return splitmix64(state_ += 0x9E3779B97F4A7C15ull); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + next_unit() * (b - a); }

  bool bernoulli(double p) { return next_unit() < p; }

  // Inverse-CDF draw over a normalized prior vector.
  int categorical(const Vec& probs) {
    double u = next_unit();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

  // Beta(a, 1) via X = U^{1/a}; a = +inf degenerates to the point mass at 1.
  double power_beta(double a) {
    if (!std::isfinite(a)) return 1.0;
    return std::pow(next_unit(), 1.0 / a);
  }

 private:
  std::uint64_t state_;
};

// Stateless per-(sample, class) uniform draw used for conformal u's.
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t sample,
                         std::uint64_t cls) {
  std::uint64_t k = stream_key(seed, stream);
  k = splitmix64(k ^ (0x9E3779B97F4A7C15ull * (sample + 1)));
  k = splitmix64(k ^ (0xC2B2AE3D27D4EB4Full * (cls + 1)));
  return static_cast<double>(k >> 11) * 0x1.0p-53;
}

}  // namespace colep

#endif

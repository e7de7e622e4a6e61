#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tumatch {

// splitmix64 finalizer; used to derive independent sub-stream seeds so that
// toggling one noise component never perturbs another's draws.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for sub-stream `stream` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream));
}

constexpr double kEulerMascheroni = 0.57721566490153286060651209;

// Seeded random stream. mt19937_64 is fully specified by the standard and all
// transforms are explicit, so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); safe to pass to log().
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + uniform() * (b - a); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Standard type I extreme value, centered: location -gamma, scale 1,
  // hence mean 0 and variance pi^2/6.
  double gumbel_centered() {
    return -std::log(-std::log(uniform())) - kEulerMascheroni;
  }

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Zero-mean logistic scaled to variance pi^2/6: the symmetric stand-in for
  // the centered Gumbel pair-shock.
  double logistic_matched() {
    const double u = uniform();
    return std::log(u / (1.0 - u)) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 engine_;
};

// One multinomial draw: `trials` balls over cells with probabilities `probs`
// (need not be normalized). Returns counts per cell.
std::vector<long> draw_multinomial(Rng& rng, long trials,
                                   const std::vector<double>& probs);

}  // namespace tumatch

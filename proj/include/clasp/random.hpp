#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace clasp {

/// Seedable generator with platform-independent sampling.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so the
/// samplers here are written out explicitly:
///   uniform()  : ((bits >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
///   normal()   : Box-Muller on two uniforms, second variate cached
///   below(n)   : rejection sampling on the top bits
/// Per-trial streams are derived from (master seed, trial index) through
/// SplitMix64, so a trial's stream does not depend on how trials are
/// scheduled across workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial) {
    return Rng(derive_seed(master_seed, trial));
  }

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial) {
    std::uint64_t state = master_seed;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (trial + 0x632be59bd9b4e019ULL);
    return splitmix64(state);
  }

  std::uint64_t next() { return engine_(); }

  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = next();
    while (draw >= limit) draw = next();
    return draw % n;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace clasp

#pragma once

#include <cmath>
#include <cstdint>

#include "renewalab/core.hpp"

namespace renewalab {

// SplitMix64 output function; a full 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Deterministic RNG stream keyed by (seed, stream index). Parallel
/// Monte Carlo derives one stream per path, so results do not depend on
/// how paths are distributed over workers.
class Rng {
public:
  Rng() : state_(mix64(0x9E3779B97F4A7C15ULL)) {}

  Rng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
    state_ = mix64(state_ ^ 0xD1B54A32D192ED03ULL);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on the open interval (0,1).
  double uniform() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vec gaussian_vec(int d) {
    Vec z(d);
    for (int i = 0; i < d; ++i) z(i) = gaussian();
    return z;
  }

private:
  std::uint64_t state_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace renewalab

#pragma once

#include <cstdint>

namespace pm {

/// splitmix64: tiny splittable 64-bit generator. Used wherever reproducible
/// streams are needed; substreams are derived from (seed, target id, channel)
/// so results do not depend on evaluation order.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0, 1].
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

private:
  std::uint64_t state_;
};

/// Substream seed for (seed, stream, channel); two mixing rounds decorrelate
/// nearby ids.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t channel = 0) {
  SplitMix64 mix(seed ^ (0xA0761D6478BD642FULL * (stream + 1)) ^
                 (0xE7037ED1A0B428DBULL * (channel + 1)));
  mix.next();
  return mix.next();
}

/// Deterministic standard normal via Box-Muller on splitmix64 uniforms.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next();

private:
  SplitMix64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pm

#pragma once

// Reproducible random streams.
//
// Every ensemble member / disorder realization draws from its own substream.
// The substream seed is a SplitMix64 hash of (seed, stream tag, index), so
// members can be generated in any order, on any thread, with identical
// results. Gaussians use the Marsaglia polar method on 53-bit uniforms;
// both steps are spelled out here instead of relying on
// std::normal_distribution, whose algorithm is implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace mfd {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream tags keep the substreams of different models disjoint.
enum class StreamTag : std::uint64_t {
  PandeyMehta = 0x504d,
  KickedRotor = 0x514b52,
  SpinChain = 0x53434821,
  Resample = 0x52534d50,
};

constexpr std::uint64_t substream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))) + index);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t index)
      : engine_(substream_seed(seed, tag, index)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double stddev) { return stddev * normal(); }

  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mfd

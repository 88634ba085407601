#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace svlm {

/// splitmix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream purposes keep independent uses of the master seed from colliding.
enum class StreamPurpose : std::uint64_t {
  innovations = 0x1000,
  limit_draws = 0x2000,
  generic = 0x3000,
};

/// Substream key derivation: for a fixed (master, purpose) the map
/// index -> seed is injective (additive golden-ratio step composed with a
/// bijective mixer), so replication substreams never collide and results do
/// not depend on which worker thread runs a replication.
inline std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                 std::uint64_t index) {
  std::uint64_t s = splitmix64(master ^ (static_cast<std::uint64_t>(purpose) * 0xD6E8FEB86659FD93ULL));
  return splitmix64(s + index * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic random stream: mt19937_64 plus an explicit Box-Muller
/// transform, so draws are reproducible across platforms independently of
/// the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on (0,1].
  double uniform_oc() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [0,1).
  double uniform_co() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_oc();
    double u2 = uniform_co();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Centered uniform with unit variance: sqrt(3)*(2u-1).
  double unit_uniform_centered() {
    return std::sqrt(3.0) * (2.0 * uniform_co() - 1.0);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace svlm

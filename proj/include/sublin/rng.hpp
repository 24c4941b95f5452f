#ifndef SUBLIN_RNG_HPP
#define SUBLIN_RNG_HPP

#include <cstdint>
#include <string_view>

namespace sublin {

/// Deterministic splittable generator (splitmix64 core).
///
/// Every randomized routine takes a seed or an Rng and derives child streams
/// by name or index, so a run is reproducible from one root seed regardless
/// of evaluation order.  No standard-library distributions are used anywhere:
/// their output is implementation-defined, which would break byte-identical
/// reruns across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * next_unit(); }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool bernoulli(double prob) { return next_unit() < prob; }

  /// Child stream keyed by a label; independent of calls made on *this.
  Rng child(std::string_view name) const {
    return Rng(mix(state_ ^ fnv1a(name)));
  }

  /// Child stream keyed by an index.
  Rng child(std::uint64_t index) const {
    return Rng(mix(state_ ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t state_;
};

}  // namespace sublin

#endif

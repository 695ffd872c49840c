#pragma once

// Seeded random streams. A (seed, stream index) pair fully determines a
// stream, so parallel trials never share generator state and results do not
// depend on scheduling.

#include <cstdint>
#include <random>

namespace lyap {

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Derived 64-bit seed for substream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits; bit-identical across platforms,
  // unlike std::uniform_real_distribution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lyap

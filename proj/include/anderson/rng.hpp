#pragma once

#include <array>
#include <cstdint>

namespace anderson {

// splitmix64 mixing step; used only for seeding and key derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** with our own uint64 -> double conversion, so that draw
// sequences are identical on every platform and toolchain. std::mt19937 would
// be portable too, but std::uniform_real_distribution is not pinned by the
// standard, and reproducibility of disorder realizations is a hard contract.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  // Stream for realization `index` under `master_seed`. Deliberately a
  // function of (master_seed, index) alone: ensembles that differ only in
  // the disorder strength share identical draws.
  static RandomStream keyed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t mixed = splitmix64_next(s) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return RandomStream(mixed);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1): top 53 bits of the state word.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace anderson

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndlhs {

// Counter-based splittable random streams. A stream is a pure function of
// (key, counter); sub-streams are derived by path, never by sequential
// splitting, so replicates can be generated in any order or in parallel.
inline constexpr const char* rng_id = "splitmix64-path/1";

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t child_gamma = 0xD1B54A32D192ED03ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

class Stream {
 public:
  explicit Stream(std::uint64_t master_seed)
      : key_(mix64(master_seed + golden_gamma)) {}

  // Value-like split: the child is keyed off (key, index), the parent is
  // untouched. Children with distinct indices never share a key.
  Stream child(std::uint64_t index) const {
    Stream s(*this);
    s.key_ = mix64(key_ ^ (child_gamma * (index + 1)));
    s.counter_ = 0;
    return s;
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
  }

  // Unbiased integer in [0, bound) by rejection on the modulus threshold.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Identifies a stream by seed plus derivation path, e.g. (seed, [replicate,
// slice]). Two equal SeedSpecs always replay the same byte sequence.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint32_t> stream_path;

  SeedSpec child(std::uint32_t index) const {
    SeedSpec s(*this);
    s.stream_path.push_back(index);
    return s;
  }

  Stream open() const {
    Stream s(master_seed);
    for (std::uint32_t p : stream_path) s = s.child(p);
    return s;
  }
};

// Fisher-Yates shuffle of {1,...,k}.
inline std::vector<int> uniform_permutation(int k, Stream& stream) {
  if (k < 1) throw std::invalid_argument("uniform_permutation: k must be positive");
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 1);
  for (int i = k - 1; i > 0; --i) {
    const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

inline std::vector<int> uniform_permutation(int k, const SeedSpec& seed) {
  Stream s = seed.open();
  return uniform_permutation(k, s);
}

inline double uniform_unit(const SeedSpec& seed) {
  Stream s = seed.open();
  return s.next_unit();
}

}  // namespace ndlhs

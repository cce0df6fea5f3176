#pragma once

// Counter-based random numbers.
//
// Every random draw in the library comes from Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3"). A generator is fully
// described by a 64-bit key and a 64-bit block counter, so independent
// streams are obtained by hashing a purpose tag and the ids of the object
// being randomised into the key. No stream ever depends on how many numbers
// another stream consumed.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace nkarena {

/// Identifier written into landscape files and run metadata so consumers know
/// which generator produced the tables ("PHI1").
inline constexpr std::uint32_t kGeneratorId = 0x50484931u;

/// SplitMix64 finaliser; used only to derive Philox keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Purpose tags separating the stream families.
enum class StreamTag : std::uint64_t {
  landscape = 0x4C414E44ull,  // "LAND"
  run = 0x52554E53ull,        // "RUNS"
  sample = 0x53414D50ull,     // "SAMP"
  ensemble = 0x454E534Dull,   // "ENSM"
};

/// hash(master_seed, purpose_tag, a, b) -> stream key.
constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                                    std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

/// Philox4x32 with 10 rounds. Produces 64-bit words; satisfies
/// std::uniform_random_bit_generator.
class Philox {
 public:
  using result_type = std::uint64_t;
  using block_type = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t key = 0, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (cursor_ == 2) {
      block_ = generate({static_cast<std::uint32_t>(counter_),
                         static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u},
                        {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
      ++counter_;
      cursor_ = 0;
    }
    const std::size_t i = 2 * static_cast<std::size_t>(cursor_++);
    return static_cast<std::uint64_t>(block_[i]) | (static_cast<std::uint64_t>(block_[i + 1]) << 32);
  }

  std::uint64_t key() const noexcept { return key_; }

  /// The raw bijection: one 128-bit counter block under a 64-bit key.
  static constexpr block_type generate(block_type ctr, std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  block_type block_{};
  int cursor_ = 2;
};

// The helpers below avoid the std:: distributions on purpose: their output is
// implementation-defined, and the library promises the same draws from the
// same key on every standard library.

/// Uniform on [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer on [0, bound). bound must be positive. Lemire's
/// multiply-shift with rejection, so the result is exactly uniform.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  unsigned __int128 product = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

template <class Rng>
bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

/// Number of failures before the first success of independent Bernoulli(p)
/// trials, 0 < p < 1. Saturates at `cap`.
template <class Rng>
std::uint64_t geometric_failures(Rng& rng, double p, std::uint64_t cap) {
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  const double g = std::floor(std::log(u) / std::log1p(-p));
  if (!(g < static_cast<double>(cap))) return cap;
  return static_cast<std::uint64_t>(g);
}

}  // namespace nkarena

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "error.hpp"
#include "rng.hpp"

namespace nkarena {

inline constexpr unsigned kMaxGenotypeLength = 64;

/// Fixed-length binary string packed into one machine word.
///
/// Position i (0-based) is bit i of the word and corresponds to x_{i+1}.
/// Text form writes position 0 first, so "0011" has x_1 = x_2 = 0.
class Genotype {
 public:
  Genotype() = default;

  explicit Genotype(unsigned n, std::uint64_t bits = 0) : bits_(bits), n_(n) {
    if (n == 0 || n > kMaxGenotypeLength) {
      throw ParameterError("genotype length must be in [1, 64], got " + std::to_string(n));
    }
    bits_ &= mask();
  }

  static Genotype from_string(std::string_view text) {
    Genotype g(static_cast<unsigned>(text.size()));
    for (unsigned i = 0; i < g.n_; ++i) {
      if (text[i] == '1') {
        g.bits_ |= std::uint64_t{1} << i;
      } else if (text[i] != '0') {
        throw ParameterError("genotype text must contain only 0/1");
      }
    }
    return g;
  }

  static Genotype ones(unsigned n) { return Genotype(n, ~std::uint64_t{0}); }

  template <class Rng>
  static Genotype random(unsigned n, Rng& rng) {
    return Genotype(n, rng());
  }

  unsigned size() const noexcept { return n_; }
  std::uint64_t bits() const noexcept { return bits_; }
  std::uint64_t mask() const noexcept {
    return n_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
  }

  bool operator[](unsigned i) const noexcept { return (bits_ >> i) & 1u; }

  void flip(unsigned i) noexcept { bits_ ^= std::uint64_t{1} << i; }
  void set(unsigned i, bool value) noexcept {
    bits_ = (bits_ & ~(std::uint64_t{1} << i)) | (std::uint64_t{value} << i);
  }

  Genotype flipped(unsigned i) const noexcept {
    Genotype g = *this;
    g.flip(i);
    return g;
  }

  Genotype complement() const noexcept { return Genotype(n_, ~bits_); }

  unsigned count_ones() const noexcept { return static_cast<unsigned>(std::popcount(bits_)); }

  std::string to_string() const {
    std::string s(n_, '0');
    for (unsigned i = 0; i < n_; ++i) {
      if ((*this)[i]) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const Genotype&, const Genotype&) = default;

 private:
  std::uint64_t bits_ = 0;
  unsigned n_ = 0;
};

inline unsigned hamming_distance(const Genotype& a, const Genotype& b) {
  if (a.size() != b.size()) throw ParameterError("hamming distance of genotypes with different lengths");
  return static_cast<unsigned>(std::popcount(a.bits() ^ b.bits()));
}

}  // namespace nkarena

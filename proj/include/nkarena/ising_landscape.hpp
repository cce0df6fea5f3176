#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "error.hpp"
#include "genotype.hpp"

namespace nkarena {

enum class IsingVariant { noninteracting, ferromagnetic };

/// One-dimensional Ising fitness with spins s_i = 2 x_i - 1 and a +N+1 shift
/// that keeps every value positive:
///   noninteracting:  F = sum_i s_i + N + 1               in {1, 3, ..., 2N+1}
///   ferromagnetic:   F = sum_i s_i s_{i+1} + N + 1       (ring, x_{N+1} = x_1)
class IsingLandscape {
 public:
  IsingLandscape(unsigned n, IsingVariant variant) : n_(n), variant_(variant) {
    if (n < 2 || n > kMaxGenotypeLength) {
      throw ParameterError("Ising length must be in [2, 64], got " + std::to_string(n));
    }
  }

  unsigned n() const noexcept { return n_; }
  IsingVariant variant() const noexcept { return variant_; }

  double fitness(const Genotype& g) const {
    if (g.size() != n_) {
      throw ParameterError("genotype length " + std::to_string(g.size()) + " does not match landscape N=" +
                           std::to_string(n_));
    }
    return evaluate(g.bits());
  }

  double evaluate(std::uint64_t bits) const noexcept {
    if (variant_ == IsingVariant::noninteracting) {
      return 2.0 * std::popcount(bits) + 1.0;
    }
    // Each domain wall turns one +1 bond into a -1 bond.
    const std::uint64_t mask = n_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
    const std::uint64_t rotated = ((bits >> 1) | (bits << (n_ - 1))) & mask;
    const int walls = std::popcount((bits ^ rotated) & mask);
    return 2.0 * n_ + 1.0 - 2.0 * walls;
  }

  double global_max_fitness() const noexcept { return 2.0 * n_ + 1.0; }
  bool is_global_max(double fitness) const noexcept { return fitness == global_max_fitness(); }

  /// 1 for the noninteracting model, 2 (all ones / all zeros) otherwise.
  unsigned global_max_count() const noexcept { return variant_ == IsingVariant::noninteracting ? 1 : 2; }

 private:
  unsigned n_;
  IsingVariant variant_;
};

inline std::string_view to_string(IsingVariant v) {
  return v == IsingVariant::noninteracting ? "ising-ni" : "ising-f";
}

}  // namespace nkarena

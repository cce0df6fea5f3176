#pragma once

// Landscape concept plus exhaustive analysis: brute-force optimum, local
// maxima census and the empirical neighbour correlation.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "genotype.hpp"
#include "ising_landscape.hpp"
#include "nk_landscape.hpp"
#include "rng.hpp"

namespace nkarena {

template <class L>
concept FitnessLandscape = requires(const L& l, const Genotype& g, std::uint64_t word, double f) {
  { l.n() } -> std::convertible_to<unsigned>;
  { l.fitness(g) } -> std::convertible_to<double>;
  { l.evaluate(word) } -> std::convertible_to<double>;
  { l.global_max_fitness() } -> std::convertible_to<double>;
  { l.is_global_max(f) } -> std::convertible_to<bool>;
};

static_assert(FitnessLandscape<NkLandscape>);
static_assert(FitnessLandscape<IsingLandscape>);

using AnyLandscape = std::variant<NkLandscape, IsingLandscape>;

inline constexpr unsigned kMaxEnumerableLength = 30;

inline void require_enumerable(unsigned n) {
  if (n > kMaxEnumerableLength) {
    throw CapabilityError("exhaustive enumeration limited to N <= " + std::to_string(kMaxEnumerableLength) +
                          ", got N=" + std::to_string(n));
  }
}

struct BruteForceMaximum {
  std::vector<Genotype> argmax;
  double fitness = 0.0;
};

/// Every genotype attaining the largest fitness, by enumeration of all 2^N.
template <FitnessLandscape L>
BruteForceMaximum global_maximum_bruteforce(const L& landscape) {
  const unsigned n = landscape.n();
  require_enumerable(n);
  BruteForceMaximum result;
  result.fitness = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> words;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < count; ++x) {
    const double f = landscape.evaluate(x);
    if (f > result.fitness) {
      result.fitness = f;
      words.assign(1, x);
    } else if (f == result.fitness) {
      words.push_back(x);
    }
  }
  for (std::uint64_t w : words) result.argmax.emplace_back(n, w);
  return result;
}

struct LandscapeStats {
  std::uint64_t local_maxima_count = 0;
  double maxima_density = 0.0;
  double alpha = 0.0;
  double empirical_neighbor_correlation = std::numeric_limits<double>::quiet_NaN();
};

/// Genotypes strictly fitter than all N single-flip neighbours.
template <FitnessLandscape L>
std::uint64_t count_strict_local_maxima(const L& landscape) {
  const unsigned n = landscape.n();
  require_enumerable(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::uint64_t maxima = 0;
  if (n <= 24) {
    std::vector<double> table(count);
    for (std::uint64_t x = 0; x < count; ++x) table[x] = landscape.evaluate(x);
    for (std::uint64_t x = 0; x < count; ++x) {
      bool is_max = true;
      for (unsigned i = 0; i < n && is_max; ++i) is_max = table[x] > table[x ^ (std::uint64_t{1} << i)];
      maxima += is_max;
    }
  } else {
    for (std::uint64_t x = 0; x < count; ++x) {
      const double f = landscape.evaluate(x);
      bool is_max = true;
      for (unsigned i = 0; i < n && is_max; ++i) is_max = f > landscape.evaluate(x ^ (std::uint64_t{1} << i));
      maxima += is_max;
    }
  }
  return maxima;
}

inline LandscapeStats count_local_maxima(const NkLandscape& landscape) {
  LandscapeStats stats;
  stats.local_maxima_count = count_strict_local_maxima(landscape);
  stats.maxima_density = static_cast<double>(stats.local_maxima_count) / std::ldexp(1.0, static_cast<int>(landscape.n()));
  stats.alpha = static_cast<double>(landscape.k()) / landscape.n();
  return stats;
}

inline LandscapeStats count_local_maxima(const IsingLandscape& landscape) {
  LandscapeStats stats;
  stats.local_maxima_count = count_strict_local_maxima(landscape);
  stats.maxima_density = static_cast<double>(stats.local_maxima_count) / std::ldexp(1.0, static_cast<int>(landscape.n()));
  return stats;
}

/// Pearson correlation of (F(x), F(x')) over random single-flip pairs, pooled
/// across the ensemble (landscapes visited round-robin). For NK ensembles the
/// estimate converges to 1 - (K+1)/N.
inline double neighbor_correlation(std::span<const NkLandscape> ensemble, std::uint64_t pairs, std::uint64_t seed) {
  if (ensemble.empty()) throw ParameterError("neighbor correlation needs a non-empty ensemble");
  if (pairs < 2) throw ParameterError("neighbor correlation needs at least two pairs");
  const unsigned n = ensemble.front().n();
  const unsigned k = ensemble.front().k();
  for (const auto& l : ensemble) {
    if (l.n() != n || l.k() != k) throw ParameterError("ensemble members must share (N, K)");
  }
  Philox rng(derive_seed(seed, StreamTag::sample));
  std::vector<double> a(pairs), b(pairs);
  for (std::uint64_t s = 0; s < pairs; ++s) {
    const NkLandscape& l = ensemble[s % ensemble.size()];
    const Genotype x = Genotype::random(n, rng);
    const auto site = static_cast<unsigned>(uniform_below(rng, n));
    a[s] = l.evaluate(x.bits());
    b[s] = l.evaluate(x.flipped(site).bits());
  }
  double mean_a = 0.0, mean_b = 0.0;
  for (std::uint64_t s = 0; s < pairs; ++s) {
    mean_a += a[s];
    mean_b += b[s];
  }
  mean_a /= static_cast<double>(pairs);
  mean_b /= static_cast<double>(pairs);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::uint64_t s = 0; s < pairs; ++s) {
    const double da = a[s] - mean_a;
    const double db = b[s] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace nkarena

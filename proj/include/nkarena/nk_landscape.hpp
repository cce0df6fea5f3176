#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "genotype.hpp"
#include "rng.hpp"

namespace nkarena {

inline constexpr unsigned kMaxNkLength = 32;
inline constexpr unsigned kMaxNkEpistasis = 20;

/// Global optimum of a landscape together with the number of genotypes that
/// attain it (saturating at 2, which is all uniqueness checks need).
struct Optimum {
  Genotype genotype;
  double fitness = 0.0;
  unsigned multiplicity = 0;
};

/// Adjacent-neighbourhood NK landscape.
///
/// Site i contributes phi_i(x_i, x_{i+1}, ..., x_{i+K}) with cyclic indices.
/// Tables are stored site-major; inside a site the entry for window bits
/// (w_0, ..., w_K) = (x_i, ..., x_{i+K}) lives at index sum_j w_j 2^j.
class NkLandscape {
 public:
  /// Wraps explicit tables (e.g. read back from disk). Computes the optimum.
  NkLandscape(unsigned n, unsigned k, std::uint64_t seed, std::vector<double> tables)
      : n_(n), k_(k), seed_(seed), tables_(std::move(tables)) {
    validate(n, k);
    if (tables_.size() != table_size(n, k)) {
      throw ParameterError("NK table size mismatch: expected " + std::to_string(table_size(n, k)) +
                           " entries, got " + std::to_string(tables_.size()));
    }
    init_optimum();
  }

  static void validate(unsigned n, unsigned k) {
    if (n < 4 || n > kMaxNkLength) {
      throw ParameterError("NK length must be in [4, " + std::to_string(kMaxNkLength) + "], got " +
                           std::to_string(n));
    }
    if (k > n - 1) {
      throw ParameterError("NK epistasis must satisfy 0 <= K <= N-1, got N=" + std::to_string(n) +
                           " K=" + std::to_string(k));
    }
    if (k > kMaxNkEpistasis) {
      throw CapabilityError("explicit NK tables limited to K <= " + std::to_string(kMaxNkEpistasis));
    }
  }

  static std::size_t table_size(unsigned n, unsigned k) { return std::size_t{n} << (k + 1); }

  unsigned n() const noexcept { return n_; }
  unsigned k() const noexcept { return k_; }
  /// Seed that regenerates exactly these tables (requested seed + bump).
  std::uint64_t seed() const noexcept { return seed_; }
  /// How many times generation re-drew because of a tied optimum.
  unsigned seed_bump() const noexcept { return bump_; }
  std::span<const double> tables() const noexcept { return tables_; }
  double phi(unsigned site, std::size_t index) const { return tables_[(std::size_t{site} << (k_ + 1)) + index]; }

  const Genotype& global_max() const noexcept { return optimum_.genotype; }
  double global_max_fitness() const noexcept { return optimum_.fitness; }
  bool is_global_max(double fitness) const noexcept { return fitness == optimum_.fitness; }

  double fitness(const Genotype& g) const {
    if (g.size() != n_) {
      throw ParameterError("genotype length " + std::to_string(g.size()) + " does not match landscape N=" +
                           std::to_string(n_));
    }
    return evaluate(g.bits());
  }

  /// Unchecked evaluation on a packed word of n() bits.
  double evaluate(std::uint64_t bits) const noexcept {
    const std::uint64_t wrapped = bits | (bits << n_);
    const std::uint64_t window = (std::uint64_t{2} << k_) - 1;
    const double* table = tables_.data();
    const std::size_t stride = std::size_t{1} << (k_ + 1);
    double sum = 0.0;
    for (unsigned i = 0; i < n_; ++i, table += stride) sum += table[(wrapped >> i) & window];
    return sum / n_;
  }

  /// Exact optimum by dynamic programming over the cyclic chain:
  /// fix the first K bits (2^K boundaries), sweep the remaining sites with
  /// the sliding window of the last K bits as state, and close the ring with
  /// the K wrap-around contributions. O(N 4^K) time, O(N 2^K) memory.
  ///
  /// Contributions are accumulated in site order 0..N-1 so the returned
  /// fitness is bit-identical to fitness(genotype).
  Optimum global_maximum_dp() const {
    const unsigned k = k_;
    const std::size_t states = std::size_t{1} << k;
    const std::size_t stride = std::size_t{1} << (k + 1);
    const std::uint64_t window = stride - 1;
    constexpr double kUnreached = -std::numeric_limits<double>::infinity();

    std::vector<double> cur(states), next(states);
    std::vector<std::uint8_t> cur_count(states), next_count(states);
    // back[(j - k) * states + s]: bit dropped from the window when site j
    // moved the chain into state s (or x_j itself when K = 0).
    std::vector<std::uint8_t> back(std::size_t{n_ - k} * states);

    Optimum best;
    best.fitness = kUnreached;
    double best_total = kUnreached;

    for (std::uint64_t boundary = 0; boundary < states; ++boundary) {
      std::fill(cur.begin(), cur.end(), kUnreached);
      std::fill(cur_count.begin(), cur_count.end(), 0);
      cur[boundary] = 0.0;
      cur_count[boundary] = 1;

      for (unsigned j = k; j < n_; ++j) {
        std::fill(next.begin(), next.end(), kUnreached);
        std::fill(next_count.begin(), next_count.end(), 0);
        const double* table = tables_.data() + std::size_t{j - k} * stride;
        std::uint8_t* trace = back.data() + std::size_t{j - k} * states;
        for (std::uint64_t s = 0; s < states; ++s) {
          if (cur_count[s] == 0) continue;
          for (std::uint64_t x = 0; x < 2; ++x) {
            const double value = cur[s] + table[s | (x << k)];
            const std::uint64_t to = k == 0 ? 0 : ((s >> 1) | (x << (k - 1)));
            const auto dropped = static_cast<std::uint8_t>(k == 0 ? x : (s & 1u));
            if (value > next[to]) {
              next[to] = value;
              next_count[to] = cur_count[s];
              trace[to] = dropped;
            } else if (value == next[to]) {
              next_count[to] = static_cast<std::uint8_t>(std::min(2, next_count[to] + cur_count[s]));
            }
          }
        }
        cur.swap(next);
        cur_count.swap(next_count);
      }

      for (std::uint64_t s = 0; s < states; ++s) {
        if (cur_count[s] == 0) continue;
        const std::uint64_t ring = s | (boundary << k);
        double total = cur[s];
        for (unsigned r = 0; r < k; ++r) {
          total += tables_[std::size_t{n_ - k + r} * stride + ((ring >> r) & window)];
        }
        if (total > best_total) {
          best_total = total;
          best.multiplicity = cur_count[s];
          best.genotype = reconstruct(boundary, s, back);
        } else if (total == best_total) {
          best.multiplicity = std::min(2u, best.multiplicity + cur_count[s]);
        }
      }
    }
    best.fitness = best_total / n_;
    return best;
  }

 private:
  friend NkLandscape generate_nk(unsigned, unsigned, std::uint64_t);

  NkLandscape(unsigned n, unsigned k, std::uint64_t seed, unsigned bump, std::vector<double> tables)
      : n_(n), k_(k), seed_(seed), bump_(bump), tables_(std::move(tables)) {}

  void init_optimum() { optimum_ = global_maximum_dp(); }

  Genotype reconstruct(std::uint64_t boundary, std::uint64_t state, const std::vector<std::uint8_t>& back) const {
    const unsigned k = k_;
    const std::size_t states = std::size_t{1} << k;
    Genotype g(n_);
    for (unsigned j = n_; j-- > k;) {
      const std::uint8_t dropped = back[std::size_t{j - k} * states + state];
      if (k == 0) {
        g.set(j, dropped != 0);
      } else {
        g.set(j, (state >> (k - 1)) & 1u);
        state = ((state << 1) & (states - 1)) | dropped;
      }
    }
    for (unsigned t = 0; t < k; ++t) g.set(t, (boundary >> t) & 1u);
    return g;
  }

  unsigned n_;
  unsigned k_;
  std::uint64_t seed_;
  unsigned bump_ = 0;
  std::vector<double> tables_;
  Optimum optimum_;
};

/// Draws all N 2^(K+1) table entries uniformly on [0, 1) from the landscape
/// stream keyed by `seed`. If the optimum is not unique the tables are drawn
/// again from seed + 1, seed + 2, ... and the offset is kept in seed_bump().
inline NkLandscape generate_nk(unsigned n, unsigned k, std::uint64_t seed) {
  NkLandscape::validate(n, k);
  for (unsigned bump = 0;; ++bump) {
    const std::uint64_t effective = seed + bump;
    Philox rng(derive_seed(effective, StreamTag::landscape));
    std::vector<double> tables(NkLandscape::table_size(n, k));
    for (double& entry : tables) entry = uniform01(rng);
    NkLandscape landscape(n, k, effective, bump, std::move(tables));
    landscape.init_optimum();
    if (landscape.optimum_.multiplicity == 1) return landscape;
  }
}

/// K = 0 optimum: per site, the state with the larger contribution.
inline Genotype per_site_argmax(const NkLandscape& landscape) {
  if (landscape.k() != 0) throw ParameterError("per-site argmax requires K = 0");
  Genotype g(landscape.n());
  for (unsigned i = 0; i < landscape.n(); ++i) g.set(i, landscape.phi(i, 1) > landscape.phi(i, 0));
  return g;
}

}  // namespace nkarena

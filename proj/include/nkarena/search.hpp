#pragma once

// Population search engines: imitative learning (IL), asexual and sexual
// genetic algorithms (AGA, SGA), blind search (BS) and the single-walker
// random adaptive walk (RAW).
//
// Time accounting. The initial random population is generation t = 1, so a
// hit while assembling it gives t* = 1. Each synchronous update adds one to
// t. The best-so-far trace is indexed by tau = t - 1, i.e. tau = 0 is the
// initial population. For RAW the walker's starting string is tau = 0 and
// every accepted flip advances tau (and t) by one.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "genotype.hpp"
#include "landscape.hpp"
#include "rng.hpp"

namespace nkarena {

enum class Algorithm { il, aga, sga, bs, raw };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::il: return "il";
    case Algorithm::aga: return "aga";
    case Algorithm::sga: return "sga";
    case Algorithm::bs: return "bs";
    case Algorithm::raw: return "raw";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::il, Algorithm::aga, Algorithm::sga, Algorithm::bs, Algorithm::raw}) {
    if (name == to_string(a)) return a;
  }
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

struct SearchConfig {
  Algorithm algorithm = Algorithm::bs;
  unsigned m = 1;
  double u = 0.0;
  std::uint64_t t_max = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) throw ParameterError("population size must be >= 1");
    if (!(u >= 0.0 && u <= 0.5)) throw ParameterError("mutation probability must lie in [0, 1/2]");
    if (t_max < 1) throw ParameterError("t_max must be >= 1");
    if (algorithm == Algorithm::sga && m < 2) throw ParameterError("SGA needs at least two members");
    if (algorithm == Algorithm::raw && m != 1) throw ParameterError("RAW is a single walker (M = 1)");
  }
};

struct Population {
  std::vector<Genotype> members;
  std::vector<double> fitness;
  std::uint64_t generation = 1;

  std::size_t size() const noexcept { return members.size(); }

  template <FitnessLandscape L>
  void assess(const L& landscape) {
    fitness.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) fitness[i] = landscape.evaluate(members[i].bits());
  }

  double best() const { return *std::max_element(fitness.begin(), fitness.end()); }
};

/// M independent uniform genotypes; generation 1, fitness cache empty.
template <class Rng>
Population init_population(unsigned m, unsigned n, Rng& rng) {
  if (m < 1) throw ParameterError("population size must be >= 1");
  Population pop;
  pop.members.reserve(m);
  for (unsigned i = 0; i < m; ++i) pop.members.push_back(Genotype::random(n, rng));
  return pop;
}

template <FitnessLandscape L, class Rng>
Population init_population(const L& landscape, unsigned m, Rng& rng) {
  Population pop = init_population(m, landscape.n(), rng);
  pop.assess(landscape);
  return pop;
}

/// Bitwise mutation with a fixed probability u: every bit flips
/// independently with probability u.
///
/// Flip masks are drawn 8 bits at a time from a Walker alias table over the
/// 256 byte patterns, P(mask) = u^|mask| (1-u)^(8-|mask|); one 64-bit draw per
/// byte supplies both the column (low 8 bits) and the acceptance threshold
/// (high 53 bits). Bits past the genotype length are discarded, which leaves
/// the remaining bits independent.
class Mutation {
 public:
  explicit Mutation(double u) : u_(u) {
    if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("mutation probability must lie in [0, 1]");
    if (u_ > 0.0 && u_ < 1.0 && u_ != 0.5) build_alias();
  }

  double rate() const noexcept { return u_; }

  template <class Rng>
  std::uint64_t draw_mask(unsigned n, Rng& rng) const {
    if (u_ == 0.0) return 0;
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    if (u_ == 1.0) return full;
    if (u_ == 0.5) return rng() & full;
    std::uint64_t mask = 0;
    for (unsigned shift = 0; shift < n; shift += 8) {
      const std::uint64_t word = rng();
      const auto column = static_cast<std::size_t>(word & 0xFFu);
      const double threshold = static_cast<double>(word >> 11) * 0x1.0p-53;
      const std::uint64_t byte = threshold < accept_[column] ? column : alias_[column];
      mask |= byte << shift;
    }
    return mask & full;
  }

  template <class Rng>
  void apply(Genotype& g, Rng& rng) const {
    if (u_ == 0.0) return;
    g = Genotype(g.size(), g.bits() ^ draw_mask(g.size(), rng));
  }

 private:
  void build_alias() {
    std::array<double, 256> scaled{};
    for (unsigned pattern = 0; pattern < 256; ++pattern) {
      const int ones = std::popcount(pattern);
      scaled[pattern] = 256.0 * std::pow(u_, ones) * std::pow(1.0 - u_, 8 - ones);
    }
    std::vector<std::uint8_t> small, large;
    for (unsigned i = 0; i < 256; ++i) (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint8_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint8_t s = small.back();
      small.pop_back();
      const std::uint8_t l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint8_t i : large) accept_[i] = 1.0;
    for (std::uint8_t i : small) accept_[i] = 1.0;
  }

  double u_;
  std::array<double, 256> accept_{};
  std::array<std::uint8_t, 256> alias_{};
};

template <class Rng>
Genotype mutate(Genotype g, double u, Rng& rng) {
  Mutation(u).apply(g, rng);
  return g;
}

/// Copies one uniformly chosen differing bit from `model` into `target`.
/// Identical strings are returned unchanged.
template <class Rng>
Genotype imitate(Genotype target, const Genotype& model, Rng& rng) {
  if (target.size() != model.size()) throw ParameterError("imitation between genotypes of different lengths");
  std::uint64_t diff = target.bits() ^ model.bits();
  if (diff == 0) return target;
  const auto count = static_cast<std::uint64_t>(std::popcount(diff));
  for (std::uint64_t skip = uniform_below(rng, count); skip > 0; --skip) diff &= diff - 1;
  target.flip(static_cast<unsigned>(std::countr_zero(diff)));
  return target;
}

/// Positions [0, n_point) from `first`, [n_point, N) from `second`.
inline Genotype one_point_crossover(const Genotype& first, const Genotype& second, unsigned n_point) {
  if (first.size() != second.size()) throw ParameterError("crossover between genotypes of different lengths");
  if (n_point < 1 || n_point >= first.size()) {
    throw ParameterError("crossover point must lie in [1, N-1], got " + std::to_string(n_point));
  }
  const std::uint64_t low = (std::uint64_t{1} << n_point) - 1;
  return Genotype(first.size(), (first.bits() & low) | (second.bits() & ~low));
}

/// Fitness-proportional selection over a fixed set of weights.
class RouletteWheel {
 public:
  explicit RouletteWheel(std::span<const double> fitness) { reset(fitness); }
  RouletteWheel() = default;

  void reset(std::span<const double> fitness) {
    cumulative_.resize(fitness.size());
    double total = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
      total += fitness[i];
      cumulative_[i] = total;
    }
    if (fitness.empty() || !(total > 0.0) || !std::isfinite(total)) {
      throw InvariantError("roulette selection needs a positive, finite fitness total");
    }
  }

  std::size_t size() const noexcept { return cumulative_.size(); }
  double total() const noexcept { return cumulative_.back(); }
  double weight(std::size_t i) const noexcept { return cumulative_[i] - (i == 0 ? 0.0 : cumulative_[i - 1]); }

  template <class Rng>
  std::size_t select(Rng& rng) const {
    return locate(uniform01(rng) * total());
  }

  /// Two distinct indices: the first by roulette over everyone, the second
  /// by roulette over the remaining M-1 members.
  template <class Rng>
  std::pair<std::size_t, std::size_t> select_pair(Rng& rng) const {
    if (size() < 2) throw ParameterError("selection without replacement needs at least two members");
    const std::size_t first = select(rng);
    const double before = first == 0 ? 0.0 : cumulative_[first - 1];
    const double removed = cumulative_[first] - before;
    double r = uniform01(rng) * (total() - removed);
    if (r >= before) r += removed;
    std::size_t second = locate(r);
    if (second == first) second = first + 1 < size() ? first + 1 : first - 1;  // rounding at the seam
    return {first, second};
  }

 private:
  std::size_t locate(double r) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

  std::vector<double> cumulative_;
};

template <class Rng>
std::size_t roulette_select(std::span<const double> fitness, Rng& rng) {
  return RouletteWheel(fitness).select(rng);
}

template <class Rng>
std::pair<std::size_t, std::size_t> select_two_without_replacement(std::span<const double> fitness, Rng& rng) {
  if (fitness.size() < 2) throw ParameterError("selection without replacement needs at least two members");
  return RouletteWheel(fitness).select_pair(rng);
}

/// Index of the fittest member; ties go to the lowest index.
inline std::size_t model_index(std::span<const double> fitness) {
  return static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
}

namespace detail {

struct StepScratch {
  Population next;
  RouletteWheel wheel;
};

/// Builds generation t+1 in scratch.next reading only `current`.
template <FitnessLandscape L, class Rng>
void step_into(const Population& current, const L& landscape, const SearchConfig& config, const Mutation& mutation,
               Rng& rng, StepScratch& scratch) {
  const std::size_t m = current.size();
  const unsigned n = landscape.n();
  auto& next = scratch.next.members;
  next.resize(m);

  switch (config.algorithm) {
    case Algorithm::il: {
      const Genotype& model = current.members[model_index(current.fitness)];
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t target = uniform_below(rng, m);
        next[i] = imitate(current.members[target], model, rng);
        mutation.apply(next[i], rng);
      }
      break;
    }
    case Algorithm::aga: {
      scratch.wheel.reset(current.fitness);
      for (std::size_t i = 0; i < m; ++i) {
        next[i] = current.members[scratch.wheel.select(rng)];
        mutation.apply(next[i], rng);
      }
      break;
    }
    case Algorithm::sga: {
      scratch.wheel.reset(current.fitness);
      for (std::size_t i = 0; i < m; ++i) {
        const auto [a, b] = scratch.wheel.select_pair(rng);
        const auto cut = static_cast<unsigned>(1 + uniform_below(rng, n - 1));
        next[i] = one_point_crossover(current.members[a], current.members[b], cut);
        mutation.apply(next[i], rng);
      }
      break;
    }
    case Algorithm::bs: {
      for (std::size_t i = 0; i < m; ++i) next[i] = Genotype::random(n, rng);
      break;
    }
    case Algorithm::raw:
      throw ParameterError("RAW has no population step; use run_raw");
  }
  scratch.next.assess(landscape);
  scratch.next.generation = current.generation + 1;
}

}  // namespace detail

/// One synchronous generation: all M offspring are built from `current`
/// only and replace it as generation t+1.
template <FitnessLandscape L, class Rng>
Population step(const Population& current, const L& landscape, const SearchConfig& config, Rng& rng) {
  if (current.fitness.size() != current.members.size()) throw ParameterError("population fitness cache is stale");
  detail::StepScratch scratch;
  detail::step_into(current, landscape, config, Mutation(config.u), rng, scratch);
  return std::move(scratch.next);
}

struct TracePoint {
  std::uint64_t tau = 0;
  double best = 0.0;
};

struct RunResult {
  enum class Outcome { success, censored, stuck };

  Outcome outcome = Outcome::censored;
  /// Halting time; for censored or stuck runs, the last generation reached.
  std::uint64_t t_star = 0;
  /// String updates performed: M t* for population searches, accepted flips
  /// for RAW.
  std::uint64_t updates = 0;
  unsigned m = 1;
  /// updates / 2^N on success, NaN otherwise.
  double cost = std::numeric_limits<double>::quiet_NaN();
  /// Running maximum as change points (tau, best fitness so far), from tau = 0.
  std::vector<TracePoint> best_trace;

  bool success() const noexcept { return outcome == Outcome::success; }
  bool censored() const noexcept { return outcome != Outcome::success; }

  /// Best fitness seen up to trace time tau.
  double best_at(std::uint64_t tau) const {
    auto it = std::upper_bound(best_trace.begin(), best_trace.end(), tau,
                               [](std::uint64_t t, const TracePoint& p) { return t < p.tau; });
    if (it == best_trace.begin()) throw ParameterError("trace starts after the requested time");
    return std::prev(it)->best;
  }
};

namespace detail {

inline void finish(RunResult& r, unsigned n) {
  if (r.success()) r.cost = static_cast<double>(r.updates) / std::ldexp(1.0, static_cast<int>(n));
}

inline void record_best(RunResult& r, std::uint64_t tau, double best) {
  if (r.best_trace.empty() || best > r.best_trace.back().best) r.best_trace.push_back({tau, best});
}

}  // namespace detail

/// Single walker applying, per step, one uniformly chosen single-bit flip that
/// does not lower fitness. A strict local maximum leaves no such flip and ends
/// the run as `stuck`.
template <FitnessLandscape L>
RunResult run_raw(const L& landscape, std::uint64_t seed,
                  std::uint64_t t_max = std::numeric_limits<std::uint64_t>::max()) {
  if (t_max < 1) throw ParameterError("t_max must be >= 1");
  Philox rng(seed);
  const unsigned n = landscape.n();
  RunResult result;
  Genotype walker = Genotype::random(n, rng);
  double f = landscape.evaluate(walker.bits());
  std::uint64_t t = 1;
  detail::record_best(result, 0, f);

  std::vector<unsigned> moves;
  moves.reserve(n);
  while (!landscape.is_global_max(f)) {
    if (t >= t_max) {
      result.outcome = RunResult::Outcome::censored;
      result.t_star = t;
      result.updates = t - 1;
      return result;
    }
    moves.clear();
    for (unsigned i = 0; i < n; ++i) {
      if (landscape.evaluate(walker.bits() ^ (std::uint64_t{1} << i)) >= f) moves.push_back(i);
    }
    if (moves.empty()) {
      result.outcome = RunResult::Outcome::stuck;
      result.t_star = t;
      result.updates = t - 1;
      return result;
    }
    walker.flip(moves[uniform_below(rng, moves.size())]);
    f = landscape.evaluate(walker.bits());
    ++t;
    detail::record_best(result, t - 1, f);
  }
  result.outcome = RunResult::Outcome::success;
  result.t_star = t;
  result.updates = t - 1;
  detail::finish(result, n);
  return result;
}

/// Runs one search until a member reaches the global maximum fitness or the
/// generation count reaches t_max.
template <FitnessLandscape L>
RunResult run_search(const L& landscape, const SearchConfig& config) {
  config.validate();
  if (config.algorithm == Algorithm::raw) return run_raw(landscape, config.seed, config.t_max);

  Philox rng(config.seed);
  const Mutation mutation(config.u);
  RunResult result;
  result.m = config.m;

  Population pop = init_population(landscape, config.m, rng);
  detail::StepScratch scratch;
  double best = pop.best();
  detail::record_best(result, 0, best);

  while (!landscape.is_global_max(best) && pop.generation < config.t_max) {
    detail::step_into(pop, landscape, config, mutation, rng, scratch);
    std::swap(pop, scratch.next);
    const double gen_best = pop.best();
    if (gen_best > best) {
      best = gen_best;
      detail::record_best(result, pop.generation - 1, best);
    }
  }
  result.t_star = pop.generation;
  result.updates = std::uint64_t{config.m} * pop.generation;
  result.outcome = landscape.is_global_max(best) ? RunResult::Outcome::success : RunResult::Outcome::censored;
  detail::finish(result, landscape.n());
  return result;
}

/// Convenience over AnyLandscape.
inline RunResult run_search(const AnyLandscape& landscape, const SearchConfig& config) {
  return std::visit([&](const auto& l) { return run_search(l, config); }, landscape);
}

}  // namespace nkarena

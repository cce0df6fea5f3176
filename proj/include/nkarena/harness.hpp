#pragma once

// Experiment orchestration: every (landscape x configuration) cell runs its
// searches on a private random stream, cells execute on a worker pool, and
// aggregation happens afterwards in cell-key order. Sums over landscapes and
// over runs are taken over sorted values, so aggregates do not depend on the
// order in which landscapes or runs are presented, nor on the worker count.

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ensemble.hpp"
#include "error.hpp"
#include "search.hpp"

namespace nkarena {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultMasterSeed = 20190501;

/// `factor` times the blind-search mean halting time, factor 2^N / M, rounded up.
inline std::uint64_t default_t_max(unsigned n, unsigned m, double factor = 100.0) {
  const double t = std::ceil(factor * std::ldexp(1.0, static_cast<int>(n)) / m);
  if (!(t < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(t));
}

/// One point of the algorithm grid. t_max == 0 selects default_t_max.
struct ConfigSpec {
  Algorithm algorithm = Algorithm::bs;
  unsigned m = 1;
  double u = 0.0;
  std::uint64_t t_max = 0;

  std::uint64_t resolved_t_max(unsigned n) const { return t_max != 0 ? t_max : default_t_max(n, m); }

  /// Stable key mixing every field, so adding or reordering configurations
  /// leaves the streams of the others unchanged.
  std::uint64_t key() const {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(algorithm));
    h = mix64(h ^ m);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(u));
    return mix64(h ^ t_max);
  }
};

struct ExperimentPlan {
  std::size_t runs_per_landscape = 1000;
  std::vector<ConfigSpec> configs;
  std::uint64_t master_seed = kDefaultMasterSeed;
  /// Worker threads; 0 means one per hardware thread.
  unsigned jobs = 0;
};

inline std::uint64_t run_seed(std::uint64_t master, std::size_t landscape, const ConfigSpec& config, std::size_t run) {
  return derive_seed(derive_seed(master, StreamTag::run, landscape, config.key()), StreamTag::run, run);
}

/// Logarithmic grid on the trace clock tau (0 = initial population):
/// 0, then round(10^(j/20)) for j = 0, 1, ..., up to last, plus last itself.
inline std::vector<std::uint64_t> log_time_grid(std::uint64_t last, unsigned points_per_decade = 20) {
  std::vector<std::uint64_t> grid{0};
  for (unsigned j = 0;; ++j) {
    const double t = std::round(std::pow(10.0, static_cast<double>(j) / points_per_decade));
    if (!(t <= static_cast<double>(last))) break;
    const auto v = static_cast<std::uint64_t>(t);
    if (v != grid.back()) grid.push_back(v);
  }
  if (grid.back() != last) grid.push_back(last);
  return grid;
}

struct RunRecord {
  std::uint64_t t_star = 0;
  std::uint64_t updates = 0;
  RunResult::Outcome outcome = RunResult::Outcome::censored;
};

/// Empirical pi(t): fraction of runs that halted successfully with t* <= t
/// (halting clock). Censored runs never count.
inline std::vector<double> success_fraction(std::span<const RunRecord> runs, std::span<const std::uint64_t> t_grid) {
  std::vector<double> pi(t_grid.size(), 0.0);
  if (runs.empty()) return pi;
  std::vector<std::uint64_t> hits;
  for (const auto& r : runs) {
    if (r.outcome == RunResult::Outcome::success) hits.push_back(r.t_star);
  }
  std::sort(hits.begin(), hits.end());
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    const auto count = std::upper_bound(hits.begin(), hits.end(), t_grid[g]) - hits.begin();
    pi[g] = static_cast<double>(count) / static_cast<double>(runs.size());
  }
  return pi;
}

namespace detail {

/// Sum of values in ascending order: independent of input order.
inline double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

inline double sorted_mean(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto size = static_cast<double>(values.size());
  return sorted_sum(std::move(values)) / size;
}

}  // namespace detail

/// Mean over runs of best-so-far / global optimum at each trace time.
inline std::vector<double> fitness_ratio_trace(std::span<const RunResult> runs, double global_fitness,
                                               std::span<const std::uint64_t> tau_grid) {
  std::vector<double> ratio(tau_grid.size(), std::numeric_limits<double>::quiet_NaN());
  if (runs.empty()) return ratio;
  std::vector<double> column(runs.size());
  for (std::size_t g = 0; g < tau_grid.size(); ++g) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].best_at(tau_grid[g]) / global_fitness;
    ratio[g] = detail::sorted_mean(column);
  }
  return ratio;
}

/// Everything one (landscape, configuration) cell produced.
struct CellResult {
  std::size_t landscape = 0;
  std::size_t config = 0;
  std::vector<RunRecord> runs;
  /// Per tau-grid point: fraction of runs already successful (t* <= tau + 1)
  /// and mean best-so-far ratio.
  std::vector<double> pi;
  std::vector<double> phi;
  bool failed = false;
  std::string error;
};

struct CostRow {
  LandscapeSpec spec;
  Algorithm algorithm = Algorithm::bs;
  unsigned m = 1;
  double u = 0.0;
  std::uint64_t t_max = 1;
  std::size_t landscapes = 0;
  std::size_t runs_per_landscape = 0;
  double mean_cost = std::numeric_limits<double>::quiet_NaN();
  double stderr_cost = std::numeric_limits<double>::quiet_NaN();
  double mean_tstar = std::numeric_limits<double>::quiet_NaN();
  double censored_fraction = 0.0;
  double success_fraction_final = 0.0;
  std::uint64_t master_seed = 0;
  /// Trace clock grid with the landscape-averaged pi_hat and phi_ratio.
  std::vector<std::uint64_t> tau_grid;
  std::vector<double> pi_hat;
  std::vector<double> phi_ratio;

  bool cost_flagged() const noexcept { return censored_fraction > 0.0; }
};

struct CellFailure {
  std::size_t landscape = 0;
  std::size_t config = 0;
  std::string message;
};

struct CostTable {
  std::vector<CostRow> rows;
  std::vector<CellFailure> failures;
  /// Cells in (config, landscape) order; raw per-run records retained.
  std::vector<CellResult> cells;

  std::span<const CellResult> cells_for(std::size_t config) const {
    if (rows.empty()) return {};
    const std::size_t per = cells.size() / rows.size();
    return std::span<const CellResult>(cells).subspan(config * per, per);
  }
};

namespace detail {

inline CellResult run_cell(const Ensemble& ensemble, const ExperimentPlan& plan, std::size_t landscape,
                           std::size_t config_index) {
  const ConfigSpec& spec = plan.configs[config_index];
  const unsigned n = ensemble.spec().n;
  const std::uint64_t t_max = spec.resolved_t_max(n);
  const auto tau_grid = log_time_grid(t_max - 1);
  const double global = ensemble.global_fitness(landscape);

  CellResult cell;
  cell.landscape = landscape;
  cell.config = config_index;
  cell.runs.reserve(plan.runs_per_landscape);
  std::vector<std::vector<double>> columns(tau_grid.size(), std::vector<double>(plan.runs_per_landscape));
  std::vector<std::size_t> hits(tau_grid.size(), 0);

  for (std::size_t r = 0; r < plan.runs_per_landscape; ++r) {
    SearchConfig config{spec.algorithm, spec.m, spec.u, t_max, run_seed(plan.master_seed, landscape, spec, r)};
    const RunResult result = run_search(ensemble.landscapes[landscape], config);
    cell.runs.push_back({result.t_star, result.updates, result.outcome});
    for (std::size_t g = 0; g < tau_grid.size(); ++g) {
      columns[g][r] = result.best_at(tau_grid[g]) / global;
      if (result.success() && result.t_star <= tau_grid[g] + 1) ++hits[g];
    }
  }
  cell.pi.resize(tau_grid.size());
  cell.phi.resize(tau_grid.size());
  for (std::size_t g = 0; g < tau_grid.size(); ++g) {
    cell.pi[g] = static_cast<double>(hits[g]) / static_cast<double>(plan.runs_per_landscape);
    cell.phi[g] = sorted_mean(std::move(columns[g]));
  }
  return cell;
}

inline CostRow aggregate(const Ensemble& ensemble, const ExperimentPlan& plan, std::size_t config_index,
                         std::span<const CellResult> cells) {
  const ConfigSpec& spec = plan.configs[config_index];
  const unsigned n = ensemble.spec().n;
  CostRow row;
  row.spec = ensemble.spec();
  row.algorithm = spec.algorithm;
  row.m = spec.m;
  row.u = spec.u;
  row.t_max = spec.resolved_t_max(n);
  row.landscapes = ensemble.size();
  row.runs_per_landscape = plan.runs_per_landscape;
  row.master_seed = plan.master_seed;
  row.tau_grid = log_time_grid(row.t_max - 1);

  const double space = std::ldexp(1.0, static_cast<int>(n));
  std::vector<double> costs, tstars;
  std::size_t total = 0, successes = 0;
  std::vector<std::vector<double>> pi(row.tau_grid.size()), phi(row.tau_grid.size());
  for (const CellResult& cell : cells) {
    if (cell.failed) continue;
    std::uint64_t updates = 0, tsum = 0, ok = 0;
    for (const RunRecord& r : cell.runs) {
      if (r.outcome != RunResult::Outcome::success) continue;
      updates += r.updates;
      tsum += r.t_star;
      ++ok;
    }
    total += cell.runs.size();
    successes += ok;
    if (ok > 0) {
      costs.push_back(static_cast<double>(updates) / static_cast<double>(ok) / space);
      tstars.push_back(static_cast<double>(tsum) / static_cast<double>(ok));
    }
    for (std::size_t g = 0; g < row.tau_grid.size(); ++g) {
      pi[g].push_back(cell.pi[g]);
      phi[g].push_back(cell.phi[g]);
    }
  }
  row.mean_cost = sorted_mean(costs);
  row.mean_tstar = sorted_mean(tstars);
  if (costs.size() >= 2) {
    std::vector<double> sq;
    for (double c : costs) sq.push_back((c - row.mean_cost) * (c - row.mean_cost));
    const double variance = sorted_sum(std::move(sq)) / static_cast<double>(costs.size() - 1);
    row.stderr_cost = std::sqrt(variance / static_cast<double>(costs.size()));
  }
  if (total > 0) {
    row.success_fraction_final = static_cast<double>(successes) / static_cast<double>(total);
    row.censored_fraction = static_cast<double>(total - successes) / static_cast<double>(total);
  }
  row.pi_hat.resize(row.tau_grid.size());
  row.phi_ratio.resize(row.tau_grid.size());
  for (std::size_t g = 0; g < row.tau_grid.size(); ++g) {
    row.pi_hat[g] = sorted_mean(std::move(pi[g]));
    row.phi_ratio[g] = sorted_mean(std::move(phi[g]));
  }
  return row;
}

}  // namespace detail

/// Runs every (landscape x configuration x run) search of the plan and
/// aggregates per configuration: per-landscape means over runs first, then
/// the mean over landscapes. Failed cells are listed in `failures` and left
/// out of the aggregates.
inline CostTable run_experiment(const Ensemble& ensemble, const ExperimentPlan& plan) {
  if (ensemble.size() == 0) throw ParameterError("experiment needs a non-empty ensemble");
  if (plan.runs_per_landscape == 0) throw ParameterError("runs per landscape must be positive");
  for (const auto& c : plan.configs) {
    SearchConfig{c.algorithm, c.m, c.u, c.resolved_t_max(ensemble.spec().n), 0}.validate();
  }

  const std::size_t per_config = ensemble.size();
  const std::size_t total = per_config * plan.configs.size();
  CostTable table;
  table.cells.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t config = i / per_config;
      const std::size_t landscape = i % per_config;
      try {
        table.cells[i] = detail::run_cell(ensemble, plan, landscape, config);
      } catch (const std::exception& e) {
        table.cells[i].landscape = landscape;
        table.cells[i].config = config;
        table.cells[i].failed = true;
        table.cells[i].error = e.what();
      }
    }
  };
  unsigned jobs = plan.jobs != 0 ? plan.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(total, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  for (const CellResult& cell : table.cells) {
    if (cell.failed) table.failures.push_back({cell.landscape, cell.config, cell.error});
  }
  for (std::size_t c = 0; c < plan.configs.size(); ++c) {
    table.rows.push_back(
        detail::aggregate(ensemble, plan, c, std::span<const CellResult>(table.cells).subspan(c * per_config, per_config)));
  }
  return table;
}

}  // namespace nkarena

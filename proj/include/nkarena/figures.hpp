#pragma once

// Parameter grids for the published figures and a driver that turns a grid
// into CSV files.
//
//   1   N=12 K=0, u in {0.001, 0.01, 0.1, 0.2}, <C> vs M
//   2   K=0, N in {12, 15, 18, 21}, M=10, <C> vs uN
//   3   K=0, uN=0.01, M=100, <t*> vs N (+ aN + bN ln N fit for IL)
//   4   N=12, K in {1, 3, 5, 9}, u=0.1, <C> vs M
//   5   (N,K) in {(12,3), (15,4), (18,5), (21,6)}, M=10, <C> vs uN
//   6   N=12 K=9, u=0.1, M in {10, 200}, pi(t)
//   7   N=12 K=9, u=0.1, M in {10, 200}, Phi_max/Phi_global
//   A1  noninteracting Ising, uN=0.1, M=100, <t*> vs N (+ fits)
//   A2  ferromagnetic Ising, uN=0.1, M=100, <t*> vs N (+ fits)
//
// Desk scale drops N > 18 and uses fewer landscapes and runs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "analytics.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "results_io.hpp"
#include "search.hpp"

namespace nkarena {

enum class FigureScale { desk, full };

struct FigureBlock {
  std::string panel;
  LandscapeSpec spec;
  std::size_t landscapes = 1;
  std::size_t runs = 1;
  std::vector<ConfigSpec> configs;
};

struct FigureFit {
  Algorithm algorithm;
  ScalingModel model;
};

struct FigurePlan {
  std::string id;
  FigureScale scale = FigureScale::desk;
  std::vector<FigureBlock> blocks;
  std::vector<FigureFit> fits;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"1", "2", "3", "4", "5", "6", "7", "A1", "A2"};
  return ids;
}

inline const std::vector<unsigned>& population_grid() {
  static const std::vector<unsigned> grid{2, 5, 10, 20, 50, 100, 200, 500, 1000};
  return grid;
}

inline const std::vector<double>& mutations_per_string_grid() {
  static const std::vector<double> grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0};
  return grid;
}

namespace detail {

inline std::vector<ConfigSpec> m_sweep(std::initializer_list<Algorithm> algorithms, double u) {
  std::vector<ConfigSpec> configs;
  for (Algorithm a : algorithms) {
    for (unsigned m : population_grid()) configs.push_back({a, m, u, 0});
  }
  return configs;
}

inline std::vector<ConfigSpec> un_sweep(std::initializer_list<Algorithm> algorithms, unsigned n, unsigned m) {
  std::vector<ConfigSpec> configs;
  for (Algorithm a : algorithms) {
    for (double un : mutations_per_string_grid()) {
      const double u = un / n;
      if (u <= 0.5) configs.push_back({a, m, u, 0});
    }
  }
  return configs;
}

}  // namespace detail

inline constexpr double kDeskCostCap = 10.0;

/// Builds the grid of figure `id`. `landscapes` / `runs` override the scale
/// defaults (desk: 20 x 50, full: 100 x 1000). Ising blocks use a single
/// landscape and landscapes x runs searches on it. Desk plans cap every run
/// at 10 2^N / M generations instead of 100 2^N / M, and NK blocks with
/// N >= 18 get a fifth of the default runs.
inline FigurePlan figure_plan(const std::string& id, FigureScale scale, std::optional<std::size_t> landscapes = {},
                              std::optional<std::size_t> runs = {}) {
  const bool full = scale == FigureScale::full;
  const std::size_t l = landscapes.value_or(full ? 100 : 20);
  const std::size_t r = runs.value_or(full ? 1000 : 50);
  const std::uint64_t n_cap = full ? 64 : 18;
  constexpr auto IL = Algorithm::il, AGA = Algorithm::aga, SGA = Algorithm::sga, BS = Algorithm::bs,
                 RAW = Algorithm::raw;

  FigurePlan plan;
  plan.id = id;
  plan.scale = scale;
  auto nk = [](unsigned n, unsigned k) { return LandscapeSpec{LandscapeFamily::nk, n, k}; };

  if (id == "1") {
    const char* panels[] = {"A", "B", "C", "D"};
    const double us[] = {0.001, 0.01, 0.1, 0.2};
    for (int p = 0; p < 4; ++p) plan.blocks.push_back({panels[p], nk(12, 0), l, r, detail::m_sweep({IL, AGA, SGA}, us[p])});
  } else if (id == "2" || id == "5") {
    const bool rugged = id == "5";
    const unsigned ns[] = {12, 15, 18, 21};
    const unsigned ks[] = {3, 4, 5, 6};
    const char* panels[] = {"A", "B", "C", "D"};
    for (int p = 0; p < 4; ++p) {
      if (ns[p] > n_cap) continue;
      plan.blocks.push_back(
          {panels[p], nk(ns[p], rugged ? ks[p] : 0), l, r, detail::un_sweep({IL, AGA, SGA}, ns[p], 10)});
    }
  } else if (id == "3") {
    for (unsigned n : {8u, 10u, 12u, 14u, 16u, 18u, 20u}) {
      if (n > n_cap) continue;
      plan.blocks.push_back({"N" + std::to_string(n), nk(n, 0), l, r,
                             {{IL, 100, 0.01 / n, 0}, {AGA, 100, 0.01 / n, 0}, {SGA, 100, 0.01 / n, 0}}});
    }
    plan.fits.push_back({IL, ScalingModel::n_log_n});
  } else if (id == "4") {
    const unsigned ks[] = {1, 3, 5, 9};
    const char* panels[] = {"A", "B", "C", "D"};
    for (int p = 0; p < 4; ++p) plan.blocks.push_back({panels[p], nk(12, ks[p]), l, r, detail::m_sweep({IL, AGA, SGA}, 0.1)});
  } else if (id == "6" || id == "7") {
    std::vector<ConfigSpec> configs;
    for (unsigned m : {10u, 200u}) {
      for (Algorithm a : {IL, AGA, SGA, BS}) configs.push_back({a, m, a == BS ? 0.5 : 0.1, 0});
    }
    plan.blocks.push_back({"AB", nk(12, 9), l, r, configs});
  } else if (id == "A1" || id == "A2") {
    const bool ferro = id == "A2";
    const std::vector<unsigned> ns =
        full ? std::vector<unsigned>{8, 12, 16, 20, 24, 28, 32} : std::vector<unsigned>{8, 12, 16};
    for (unsigned n : ns) {
      LandscapeSpec spec{ferro ? LandscapeFamily::ising_ferromagnetic : LandscapeFamily::ising_noninteracting, n, 0};
      plan.blocks.push_back({"N" + std::to_string(n), spec, 1, l * r,
                             {{IL, 100, 0.1 / n, 0}, {AGA, 100, 0.1 / n, 0}, {SGA, 100, 0.1 / n, 0}, {RAW, 1, 0.0, 0}}});
    }
    plan.fits.push_back({IL, ScalingModel::linear});
    plan.fits.push_back({RAW, ferro ? ScalingModel::quadratic : ScalingModel::linear});
    if (ferro) plan.fits.push_back({RAW, ScalingModel::power});
  } else {
    throw ParameterError("unknown figure id '" + id + "' (expected 1-7, A1 or A2)");
  }
  if (!full) {
    for (FigureBlock& block : plan.blocks) {
      for (ConfigSpec& c : block.configs) c.t_max = default_t_max(block.spec.n, c.m, kDeskCostCap);
      if (!runs && block.spec.family == LandscapeFamily::nk && block.spec.n >= 18) {
        block.runs = std::max<std::size_t>(1, r / 5);
      }
    }
  }
  return plan;
}

/// Closed-form blind-search rows for every (N, M) in the figure.
inline std::string format_baseline_csv(const FigurePlan& plan) {
  std::ostringstream out;
  out << "family,n,k,m,p,mean_tstar,mean_cost\n";
  for (const FigureBlock& block : plan.blocks) {
    std::vector<unsigned> ms;
    for (const auto& c : block.configs) {
      if (c.algorithm != Algorithm::raw && std::find(ms.begin(), ms.end(), c.m) == ms.end()) ms.push_back(c.m);
    }
    const bool degenerate = block.spec.family == LandscapeFamily::ising_ferromagnetic;
    for (unsigned m : ms) {
      const auto model = BlindSearchModel::for_length(block.spec.n, m, degenerate);
      out << to_string(block.spec.family) << ',' << block.spec.n << ',' << block.spec.k << ',' << m << ','
          << format_real(model.p) << ',' << format_real(mean_halting_time(model)) << ','
          << format_real(mean_cost(model, block.spec.n)) << '\n';
    }
  }
  return out.str();
}

struct FitRow {
  LandscapeFamily family;
  Algorithm algorithm;
  ScalingFit fit;
  std::size_t points = 0;
};

inline std::vector<FitRow> figure_fits(const FigurePlan& plan, const std::vector<CostRow>& rows) {
  std::vector<FitRow> fits;
  for (const FigureFit& wanted : plan.fits) {
    std::vector<ScalingPoint> points;
    LandscapeFamily family = LandscapeFamily::nk;
    for (const CostRow& row : rows) {
      if (row.algorithm != wanted.algorithm || std::isnan(row.mean_tstar)) continue;
      // RAW halting time counts accepted flips, one less than t*.
      const double y = row.algorithm == Algorithm::raw ? row.mean_tstar - 1.0 : row.mean_tstar;
      points.push_back({static_cast<double>(row.spec.n), y});
      family = row.spec.family;
    }
    if (points.size() < 3) continue;
    fits.push_back({family, wanted.algorithm, fit_scaling(points, wanted.model), points.size()});
  }
  return fits;
}

inline std::string format_fits_csv(const std::vector<FitRow>& fits) {
  std::ostringstream out;
  out << "family,algorithm,model,coef_0,coef_1,r_squared,points\n";
  for (const FitRow& f : fits) {
    out << to_string(f.family) << ',' << to_string(f.algorithm) << ',' << to_string(f.fit.model) << ','
        << format_real(f.fit.coefficients[0]) << ','
        << (f.fit.coefficients.size() > 1 ? format_real(f.fit.coefficients[1]) : std::string("nan")) << ','
        << format_real(f.fit.r_squared) << ',' << f.points << '\n';
  }
  return out.str();
}

/// Loads <root>/<spec dir> when it holds at least `count` landscapes drawn
/// from `master_seed` (members are indexed, so a prefix is still the same
/// ensemble); otherwise generates it, replacing the directory only if
/// `regenerate` is set. Ising ensembles live in memory only.
inline Ensemble obtain_ensemble(const LandscapeSpec& spec, std::size_t count, std::uint64_t master_seed,
                                const std::filesystem::path& root, bool regenerate) {
  if (spec.family != LandscapeFamily::nk) return make_ensemble(spec, count, master_seed);
  const auto dir = ensemble_directory(root, spec);
  if (std::filesystem::exists(dir / "manifest.txt") && !regenerate) {
    std::ifstream in(dir / "manifest.txt");
    const Manifest manifest = parse_manifest(in);
    if (manifest.master_seed == master_seed && manifest.entries.size() >= count && manifest.spec == spec) {
      Ensemble ensemble = load_ensemble(dir);
      ensemble.landscapes.resize(count, ensemble.landscapes.front());
      ensemble.manifest.entries.resize(count);
      return ensemble;
    }
    throw Error("ensemble " + dir.string() + " was built with different parameters; regenerate it or use another --data");
  }
  return build_ensemble(spec, count, master_seed, root, regenerate);
}

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every block of the figure and writes results.csv, trace.csv,
/// baseline.csv, fits.csv (when the figure has fits) and metadata.json.
inline std::vector<CostRow> run_figure(const FigurePlan& plan, const std::filesystem::path& data_root,
                                       std::uint64_t master_seed, unsigned jobs, const std::filesystem::path& out_dir,
                                       bool regenerate = false, const ProgressFn& progress = {}) {
  std::vector<CostRow> rows;
  nlohmann::json blocks = nlohmann::json::array();
  for (const FigureBlock& block : plan.blocks) {
    if (progress) progress("figure " + plan.id + " panel " + block.panel + ": " + block.spec.directory_name());
    const Ensemble ensemble = obtain_ensemble(block.spec, block.landscapes, master_seed, data_root, regenerate);
    ExperimentPlan experiment;
    experiment.runs_per_landscape = block.runs;
    experiment.configs = block.configs;
    experiment.master_seed = master_seed;
    experiment.jobs = jobs;
    const CostTable table = run_experiment(ensemble, experiment);
    rows.insert(rows.end(), table.rows.begin(), table.rows.end());
    auto meta = metadata_json(table, experiment, ensemble);
    meta["panel"] = block.panel;
    blocks.push_back(std::move(meta));
  }

  std::filesystem::create_directories(out_dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << text;
    if (!out) throw Error("failed writing " + path.string());
  };
  write(out_dir / "results.csv", format_results_csv(rows));
  write(out_dir / "trace.csv", format_trace_csv(rows));
  write(out_dir / "baseline.csv", format_baseline_csv(plan));
  if (!plan.fits.empty()) write(out_dir / "fits.csv", format_fits_csv(figure_fits(plan, rows)));
  nlohmann::json meta;
  meta["figure"] = plan.id;
  meta["scale"] = plan.scale == FigureScale::full ? "full" : "desk";
  meta["blind_search_baseline"] = "analytic (baseline.csv); simulated rows where algorithm=bs";
  meta["blocks"] = blocks;
  write(out_dir / "metadata.json", meta.dump(2) + "\n");
  return rows;
}

}  // namespace nkarena

// nkarena command-line entry point.
//
//   nkarena gen      --family nk --n 12 --k 3 --count 100 --out data
//   nkarena run      --ensemble data/N12_K3 --algo il --m 10,100 --u 0.1
//   nkarena stats    --ensemble data/N12_K3
//   nkarena figure   --which 4 --scale desk --out fig4
//   nkarena analytic --n 12 --m 10 --which mean-cost
//
// Exit codes: 0 success, 1 usage error, 2 runtime or I/O error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nkarena/figures.hpp"
#include "nkarena/nkarena.hpp"

namespace fs = std::filesystem;
using namespace nkarena;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_data_root() {
  const char* env = std::getenv("NK_ARENA_DATA");
  return env != nullptr && *env != '\0' ? env : "data";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    items.push_back(item);
  }
  if (items.empty()) throw UsageError("empty list");
  return items;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  std::istringstream in(text);
  if (!(in >> value) || !in.eof()) throw UsageError(std::string("invalid ") + what + " '" + text + "'");
  return value;
}

double parse_time(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "∞") return std::numeric_limits<double>::infinity();
  return parse_number<double>(text, "time");
}

std::string fmt(double v) { return format_real(v); }

// --- gen -------------------------------------------------------------------

struct GenOptions {
  std::string family = "nk";
  unsigned n = 12;
  unsigned k = 0;
  std::size_t count = 100;
  std::uint64_t seed = kDefaultMasterSeed;
  std::string out = default_data_root();
  bool overwrite = false;
};

int cmd_gen(const GenOptions& o) {
  LandscapeSpec spec;
  try {
    spec = {parse_family(o.family), o.n, o.family == "nk" ? o.k : 0};
    spec.validate();
    if (o.count == 0) throw ParameterError("--count must be positive");
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const Ensemble ensemble = build_ensemble(spec, o.count, o.seed, o.out, o.overwrite);
  const double maxima = ensemble.manifest.mean_local_maxima();
  std::printf("wrote %zu landscapes to %s (digest %s)\n", ensemble.size(),
              ensemble_directory(o.out, spec).string().c_str(), manifest_digest(ensemble.manifest).c_str());
  if (!std::isnan(maxima)) {
    std::printf("mean local maxima %s, density %s\n", fmt(maxima).c_str(),
                fmt(maxima / std::ldexp(1.0, static_cast<int>(spec.n))).c_str());
  }
  return 0;
}

// --- run -------------------------------------------------------------------

struct RunOptions {
  std::string ensemble;
  std::string algo;
  std::string m = "10";
  std::string u = "0.1";
  std::size_t runs = 1000;
  std::uint64_t tmax = 0;
  std::uint64_t seed = kDefaultMasterSeed;
  std::string out = "results";
  unsigned jobs = 0;
};

int cmd_run(const RunOptions& o) {
  Algorithm algorithm;
  std::vector<unsigned> ms;
  std::vector<double> us;
  try {
    algorithm = parse_algorithm(o.algo);
    for (const auto& item : split_list(o.m)) ms.push_back(parse_number<unsigned>(item, "population size"));
    for (const auto& item : split_list(o.u)) us.push_back(parse_number<double>(item, "mutation probability"));
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  if (o.runs == 0) throw UsageError("--runs must be positive");
  if (algorithm == Algorithm::raw) {
    if (ms.size() != 1 || ms.front() != 1) std::fprintf(stderr, "warning: RAW is a single walker; using M = 1\n");
    ms = {1};
    us = {0.0};
  }
  if (algorithm == Algorithm::bs) us = {0.5};

  if (!fs::exists(fs::path(o.ensemble) / "manifest.txt")) {
    std::fprintf(stderr, "error: no ensemble at %s\n", o.ensemble.c_str());
    return kExitRuntime;
  }
  const Ensemble ensemble = load_ensemble(o.ensemble);

  ExperimentPlan plan;
  plan.runs_per_landscape = o.runs;
  plan.master_seed = o.seed;
  plan.jobs = o.jobs;
  for (unsigned m : ms) {
    for (double u : us) {
      ConfigSpec config{algorithm, m, u, o.tmax};
      try {
        SearchConfig{algorithm, m, u, config.resolved_t_max(ensemble.spec().n), 0}.validate();
      } catch (const ParameterError& e) {
        throw UsageError(e.what());
      }
      plan.configs.push_back(config);
    }
  }

  const CostTable table = run_experiment(ensemble, plan);
  export_results(table, plan, ensemble, o.out);
  std::printf("%-4s %6s %8s %14s %12s %10s\n", "algo", "M", "u", "mean_cost", "stderr", "censored");
  for (const CostRow& r : table.rows) {
    std::printf("%-4s %6u %8s %14s %12s %10s%s\n", std::string(to_string(r.algorithm)).c_str(), r.m,
                fmt(r.u).c_str(), fmt(r.mean_cost).c_str(), fmt(r.stderr_cost).c_str(),
                fmt(r.censored_fraction).c_str(), r.cost_flagged() ? "  (censored runs excluded)" : "");
  }
  for (const CellFailure& f : table.failures) {
    std::fprintf(stderr, "cell failed: landscape %zu config %zu: %s\n", f.landscape, f.config, f.message.c_str());
  }
  std::printf("results written to %s\n", o.out.c_str());
  return table.failures.empty() ? 0 : kExitRuntime;
}

// --- stats -----------------------------------------------------------------

struct StatsOptions {
  std::string ensemble;
  std::uint64_t pairs = 100000;
  std::uint64_t seed = kDefaultMasterSeed;
};

int cmd_stats(const StatsOptions& o) {
  if (!fs::exists(fs::path(o.ensemble) / "manifest.txt")) {
    std::fprintf(stderr, "error: no ensemble at %s\n", o.ensemble.c_str());
    return kExitRuntime;
  }
  const Ensemble ensemble = load_ensemble(o.ensemble);
  const LandscapeSpec& spec = ensemble.spec();
  std::printf("family %s, N = %u, K = %u, %zu landscapes, digest %s\n", std::string(to_string(spec.family)).c_str(),
              spec.n, spec.k, ensemble.size(), manifest_digest(ensemble.manifest).c_str());
  const double maxima = ensemble.manifest.mean_local_maxima();
  if (!std::isnan(maxima)) {
    std::printf("mean local maxima   %s\n", fmt(maxima).c_str());
    std::printf("maxima density      %s\n", fmt(maxima / std::ldexp(1.0, static_cast<int>(spec.n))).c_str());
  }
  if (spec.family == LandscapeFamily::nk) {
    std::printf("alpha = K/N         %s\n", fmt(static_cast<double>(spec.k) / spec.n).c_str());
    std::vector<NkLandscape> nk;
    for (const auto& l : ensemble.landscapes) nk.push_back(std::get<NkLandscape>(l));
    std::printf("neighbor correlation %s (1-(K+1)/N = %s)\n", fmt(neighbor_correlation(nk, o.pairs, o.seed)).c_str(),
                fmt(1.0 - (spec.k + 1.0) / spec.n).c_str());
  }
  return 0;
}

// --- figure ----------------------------------------------------------------

struct FigureOptions {
  std::string which;
  std::string scale = "desk";
  std::string out;
  std::string data = default_data_root();
  std::uint64_t seed = kDefaultMasterSeed;
  unsigned jobs = 0;
  std::size_t landscapes = 0;
  std::size_t runs = 0;
  bool regenerate = false;
};

int cmd_figure(const FigureOptions& o) {
  FigurePlan plan;
  try {
    const FigureScale scale = o.scale == "full" ? FigureScale::full : FigureScale::desk;
    plan = figure_plan(o.which, scale, o.landscapes ? std::optional(o.landscapes) : std::nullopt,
                       o.runs ? std::optional(o.runs) : std::nullopt);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const fs::path out = o.out.empty() ? fs::path("figure_" + o.which) : fs::path(o.out);
  const auto rows = run_figure(plan, o.data, o.seed, o.jobs, out, o.regenerate,
                               [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); });
  std::printf("figure %s: %zu rows written to %s\n", o.which.c_str(), rows.size(), out.string().c_str());
  return 0;
}

// --- analytic --------------------------------------------------------------

struct AnalyticOptions {
  unsigned n = 12;
  unsigned m = 1;
  std::string which;
  std::string t = "1";
  bool degenerate = false;
};

int cmd_analytic(const AnalyticOptions& o) {
  try {
    const auto model = BlindSearchModel::for_length(o.n, o.m, o.degenerate);
    if (o.which == "mean-t") {
      std::printf("%s\n", fmt(mean_halting_time(model)).c_str());
    } else if (o.which == "mean-cost") {
      std::printf("%s\n", fmt(mean_cost(model, o.n)).c_str());
    } else {
      const double t = parse_time(o.t);
      if (o.which == "cdf") {
        std::printf("%s\n", fmt(success_cdf(model, t)).c_str());
      } else {
        if (std::isinf(t) || t < 1 || t != std::floor(t)) throw UsageError("pmf needs an integer --t >= 1");
        std::printf("%s\n", fmt(halting_pmf(model, static_cast<std::uint64_t>(t))).c_str());
      }
    }
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nkarena: imitative learning vs genetic algorithms on NK and Ising landscapes"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a landscape ensemble on disk");
  gen_cmd->add_option("--family", gen.family, "landscape family")->check(CLI::IsMember({"nk", "ising-ni", "ising-f"}));
  gen_cmd->add_option("--n", gen.n, "string length N");
  gen_cmd->add_option("--k", gen.k, "epistasis K (nk only)");
  gen_cmd->add_option("--count", gen.count, "number of landscapes");
  gen_cmd->add_option("--seed", gen.seed, "master seed");
  gen_cmd->add_option("--out", gen.out, "data root (NK_ARENA_DATA)");
  gen_cmd->add_flag("--overwrite", gen.overwrite, "replace an existing ensemble directory");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run searches on an ensemble and write results CSVs");
  run_cmd->add_option("--ensemble", run.ensemble, "ensemble directory (holds manifest.txt)")->required();
  run_cmd->add_option("--algo", run.algo, "algorithm")->required()->check(CLI::IsMember({"il", "aga", "sga", "bs", "raw"}));
  run_cmd->add_option("--m", run.m, "population size(s), comma separated");
  run_cmd->add_option("--u", run.u, "mutation probability(ies), comma separated");
  run_cmd->add_option("--runs", run.runs, "searches per landscape");
  run_cmd->add_option("--tmax", run.tmax, "generation cap (0: ceil(100 2^N / M))");
  run_cmd->add_option("--seed", run.seed, "master seed");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--jobs", run.jobs, "worker threads (0: logical cores)");

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "landscape statistics of an ensemble");
  stats_cmd->add_option("--ensemble", stats.ensemble, "ensemble directory")->required();
  stats_cmd->add_option("--pairs", stats.pairs, "neighbor pairs sampled for the correlation");
  stats_cmd->add_option("--seed", stats.seed, "sampling seed");

  FigureOptions figure;
  auto* figure_cmd = app.add_subcommand("figure", "produce the data behind one figure");
  figure_cmd->add_option("--which", figure.which, "figure id: 1-7, A1, A2")->required();
  figure_cmd->add_option("--scale", figure.scale, "desk trims N > 18 and uses 20 landscapes x 50 runs")
      ->check(CLI::IsMember({"desk", "full"}));
  figure_cmd->add_option("--out", figure.out, "output directory (default figure_<id>)");
  figure_cmd->add_option("--data", figure.data, "data root for ensembles (NK_ARENA_DATA)");
  figure_cmd->add_option("--seed", figure.seed, "master seed");
  figure_cmd->add_option("--jobs", figure.jobs, "worker threads (0: logical cores)");
  figure_cmd->add_option("--landscapes", figure.landscapes, "override landscapes per panel (0: scale default)");
  figure_cmd->add_option("--runs", figure.runs, "override runs per landscape (0: scale default)");
  figure_cmd->add_flag("--regenerate", figure.regenerate, "rebuild ensembles that do not match");

  AnalyticOptions analytic;
  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form blind-search values");
  analytic_cmd->add_option("--n", analytic.n, "string length N");
  analytic_cmd->add_option("--m", analytic.m, "population size M");
  analytic_cmd->add_option("--which", analytic.which, "quantity")
      ->required()
      ->check(CLI::IsMember({"pmf", "mean-t", "cdf", "mean-cost"}));
  analytic_cmd->add_option("--t", analytic.t, "time for pmf/cdf; 'inf' gives the t -> infinity limit (1)");
  analytic_cmd->add_flag("--degenerate", analytic.degenerate, "two global maxima: p = 1/2^(N-1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*run_cmd) return cmd_run(run);
    if (*stats_cmd) return cmd_stats(stats);
    if (*figure_cmd) return cmd_figure(figure);
    if (*analytic_cmd) return cmd_analytic(analytic);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

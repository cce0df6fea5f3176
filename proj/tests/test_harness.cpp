#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "json.hpp"

#include "nkarena/figures.hpp"
#include "nkarena/nkarena.hpp"

using namespace nkarena;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("nkarena_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentPlan small_plan(unsigned jobs) {
  ExperimentPlan plan;
  plan.runs_per_landscape = 6;
  plan.master_seed = 99;
  plan.jobs = jobs;
  plan.configs = {{Algorithm::il, 10, 0.1, 0},
                  {Algorithm::aga, 10, 0.1, 0},
                  {Algorithm::sga, 10, 0.1, 0},
                  {Algorithm::bs, 10, 0.5, 0},
                  {Algorithm::raw, 1, 0.0, 0}};
  return plan;
}

}  // namespace

TEST(Ensemble, BuildLoadAndDigest) {
  TempDir dir;
  const LandscapeSpec spec{LandscapeFamily::nk, 12, 3};
  const auto built = build_ensemble(spec, 5, 7, dir.path());
  const fs::path where = dir.path() / "N12_K3";
  EXPECT_TRUE(fs::exists(where / "manifest.txt"));
  EXPECT_TRUE(fs::exists(where / "landscape_004.nkl"));
  const auto loaded = load_ensemble(where);
  ASSERT_EQ(loaded.size(), 5u);
  EXPECT_EQ(manifest_digest(loaded.manifest), manifest_digest(built.manifest));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(loaded.global_fitness(i), built.global_fitness(i));
    EXPECT_GE(loaded.manifest.entries[i].local_maxima, 1);
  }

  EXPECT_THROW(build_ensemble(spec, 5, 7, dir.path()), Error);
  const auto rebuilt = build_ensemble(spec, 5, 7, dir.path(), true);
  EXPECT_EQ(manifest_digest(rebuilt.manifest), manifest_digest(built.manifest));
  EXPECT_NE(manifest_digest(make_ensemble(spec, 5, 8).manifest), manifest_digest(built.manifest));
}

TEST(Ensemble, ManifestTextRoundTrip) {
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 3, 5);
  const std::string text = format_manifest(e.manifest);
  EXPECT_EQ(text.rfind("# nkarena-manifest v1 family=nk n=10 k=2 count=3 master_seed=5", 0), 0u);
  std::istringstream in(text);
  const auto back = parse_manifest(in);
  EXPECT_EQ(format_manifest(back), text);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.entries[i].global_fitness, e.global_fitness(i));
}

TEST(Ensemble, SmoothLandscapesHaveOneMaximum) {
  const auto e = make_ensemble({LandscapeFamily::nk, 12, 0}, 20, 1);
  for (const auto& entry : e.manifest.entries) EXPECT_EQ(entry.local_maxima, 1);
}

TEST(Ensemble, IsingEnsemblesNeedNoFiles) {
  TempDir dir;
  const auto e = build_ensemble({LandscapeFamily::ising_ferromagnetic, 10, 0}, 2, 1, dir.path());
  EXPECT_EQ(e.global_fitness(0), 21.0);
  EXPECT_EQ(e.manifest.entries[0].local_maxima, 2);
  const auto loaded = load_ensemble(dir.path() / "ising-f_N10");
  EXPECT_EQ(loaded.size(), 2u);
}

TEST(Ensemble, MismatchedFileIsRejected) {
  TempDir dir;
  build_ensemble({LandscapeFamily::nk, 8, 1}, 2, 3, dir.path());
  const fs::path where = dir.path() / "N8_K1";
  fs::copy_file(where / "landscape_000.nkl", where / "landscape_001.nkl", fs::copy_options::overwrite_existing);
  EXPECT_THROW(load_ensemble(where), Error);
  EXPECT_THROW(load_ensemble(dir.path() / "missing"), Error);
}

TEST(Harness, DefaultCapAndGrid) {
  EXPECT_EQ(default_t_max(12, 10), 40960u);
  EXPECT_EQ(default_t_max(12, 1000), 410u);
  EXPECT_EQ(default_t_max(18, 10, 10.0), 262144u);
  const auto grid = log_time_grid(100);
  EXPECT_EQ(grid.front(), 0u);
  EXPECT_EQ(grid[1], 1u);
  EXPECT_EQ(grid.back(), 100u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(std::adjacent_find(grid.begin(), grid.end()), grid.end());
}

TEST(Harness, SuccessFractionIgnoresCensoredRuns) {
  const std::vector<RunRecord> runs{{1, 10, RunResult::Outcome::success},
                                    {5, 50, RunResult::Outcome::success},
                                    {9, 90, RunResult::Outcome::censored},
                                    {3, 3, RunResult::Outcome::stuck}};
  const std::vector<std::uint64_t> grid{0, 1, 4, 5, 100};
  const auto pi = success_fraction(runs, grid);
  EXPECT_EQ(pi, (std::vector<double>{0.0, 0.25, 0.25, 0.5, 0.5}));
}

TEST(Harness, ResultsIndependentOfWorkerCount) {
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 4, 3);
  const auto one = run_experiment(e, small_plan(1));
  const auto three = run_experiment(e, small_plan(3));
  EXPECT_EQ(format_results_csv(one.rows), format_results_csv(three.rows));
  EXPECT_EQ(format_trace_csv(one.rows), format_trace_csv(three.rows));
  EXPECT_TRUE(one.failures.empty());
}

TEST(Harness, ConfigOrderDoesNotChangeRows) {
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 3, 3);
  auto plan = small_plan(2);
  const auto forward = run_experiment(e, plan);
  std::reverse(plan.configs.begin(), plan.configs.end());
  const auto backward = run_experiment(e, plan);
  const std::size_t rows = forward.rows.size();
  for (std::size_t i = 0; i < rows; ++i) {
    EXPECT_EQ(format_results_csv({forward.rows[i]}), format_results_csv({backward.rows[rows - 1 - i]}));
  }
}

TEST(Harness, AggregatesAreConsistent) {
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 4, 5);
  const auto table = run_experiment(e, small_plan(1));
  for (std::size_t c = 0; c < table.rows.size(); ++c) {
    const CostRow& row = table.rows[c];
    EXPECT_EQ(row.landscapes, 4u);
    EXPECT_EQ(row.runs_per_landscape, 6u);
    EXPECT_DOUBLE_EQ(row.censored_fraction + row.success_fraction_final, 1.0);
    EXPECT_EQ(row.pi_hat.back(), row.success_fraction_final);
    EXPECT_EQ(row.tau_grid.back(), row.t_max - 1);
    for (std::size_t g = 1; g < row.tau_grid.size(); ++g) {
      EXPECT_GE(row.pi_hat[g], row.pi_hat[g - 1]);
      EXPECT_GE(row.phi_ratio[g], row.phi_ratio[g - 1]);
    }
    EXPECT_LE(row.phi_ratio.back(), 1.0);
    // Landscape-averaged cost recomputed from the retained per-run records.
    double sum = 0.0;
    int used = 0;
    for (const CellResult& cell : table.cells_for(c)) {
      double updates = 0.0;
      int ok = 0;
      for (const auto& r : cell.runs) {
        if (r.outcome == RunResult::Outcome::success) {
          updates += static_cast<double>(r.updates);
          ++ok;
        }
      }
      if (ok == 0) continue;  // e.g. RAW stuck on every run
      sum += updates / ok / 1024.0;
      ++used;
    }
    EXPECT_NEAR(row.mean_cost, sum / used, 1e-12);
  }
}

TEST(Harness, CensoredRunsAreFlagged) {
  const auto e = make_ensemble({LandscapeFamily::nk, 12, 9}, 2, 5);
  ExperimentPlan plan;
  plan.runs_per_landscape = 10;
  plan.configs = {{Algorithm::il, 10, 0.001, 30}};
  const auto table = run_experiment(e, plan);
  const CostRow& row = table.rows.front();
  EXPECT_GT(row.censored_fraction, 0.0);
  EXPECT_TRUE(row.cost_flagged());
  const auto meta = metadata_json(table, plan, e);
  ASSERT_EQ(meta["censored_rows"].size(), 1u);
  EXPECT_EQ(meta["censored_rows"][0]["algorithm"], "il");
}

TEST(Harness, InvalidPlansAreRejected) {
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 1, 5);
  ExperimentPlan plan;
  plan.configs = {{Algorithm::sga, 1, 0.1, 0}};
  EXPECT_THROW(run_experiment(e, plan), ParameterError);
  plan.configs = {{Algorithm::il, 4, 0.1, 0}};
  plan.runs_per_landscape = 0;
  EXPECT_THROW(run_experiment(e, plan), ParameterError);
}

TEST(ResultsIo, ExportImportRoundTrip) {
  TempDir dir;
  const auto e = make_ensemble({LandscapeFamily::nk, 10, 2}, 3, 3);
  const auto plan = small_plan(2);
  const auto table = run_experiment(e, plan);
  export_results(table, plan, e, dir.path() / "a");
  export_results(run_experiment(e, plan), plan, e, dir.path() / "b");
  EXPECT_EQ(slurp(dir.path() / "a" / "results.csv"), slurp(dir.path() / "b" / "results.csv"));
  EXPECT_EQ(slurp(dir.path() / "a" / "trace.csv"), slurp(dir.path() / "b" / "trace.csv"));

  const std::string results = slurp(dir.path() / "a" / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')), kResultsHeader);

  const auto back = import_results(dir.path() / "a" / "results.csv");
  ASSERT_EQ(back.size(), table.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].algorithm, table.rows[i].algorithm);
    EXPECT_EQ(back[i].mean_cost, table.rows[i].mean_cost);
    EXPECT_EQ(back[i].stderr_cost, table.rows[i].stderr_cost);
    EXPECT_EQ(back[i].mean_tstar, table.rows[i].mean_tstar);
    EXPECT_EQ(back[i].tau_grid, table.rows[i].tau_grid);
    EXPECT_EQ(back[i].pi_hat, table.rows[i].pi_hat);
    EXPECT_EQ(back[i].phi_ratio, table.rows[i].phi_ratio);
  }
  EXPECT_EQ(format_results_csv(back), results);

  const auto meta = nlohmann::json::parse(slurp(dir.path() / "a" / "metadata.json"));
  EXPECT_EQ(meta["master_seed"], 99);
  EXPECT_EQ(meta["generator_id"], "0x50484931");
  EXPECT_EQ(meta["configs"].size(), 5u);
}

TEST(ResultsIo, RealFormatting) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(parse_real(format_real(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(parse_real("nan")));
  EXPECT_THROW(parse_real("1.5x"), Error);
}

TEST(Figures, GridsFollowCaptions) {
  const auto f4 = figure_plan("4", FigureScale::desk);
  ASSERT_EQ(f4.blocks.size(), 4u);
  const unsigned ks[] = {1, 3, 5, 9};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(f4.blocks[i].spec.n, 12u);
    EXPECT_EQ(f4.blocks[i].spec.k, ks[i]);
    for (const auto& c : f4.blocks[i].configs) EXPECT_EQ(c.u, 0.1);
  }

  const auto f3 = figure_plan("3", FigureScale::desk);
  ASSERT_EQ(f3.fits.size(), 1u);
  EXPECT_EQ(f3.fits[0].model, ScalingModel::n_log_n);
  for (const auto& b : f3.blocks) {
    EXPECT_LE(b.spec.n, 18u);
    for (const auto& c : b.configs) {
      EXPECT_EQ(c.m, 100u);
      EXPECT_NEAR(c.u * b.spec.n, 0.01, 1e-15);
    }
  }
  EXPECT_EQ(figure_plan("3", FigureScale::full).blocks.back().spec.n, 20u);

  const auto f2 = figure_plan("2", FigureScale::desk);
  EXPECT_EQ(f2.blocks.size(), 3u);
  for (const auto& b : f2.blocks) {
    for (const auto& c : b.configs) EXPECT_EQ(c.resolved_t_max(b.spec.n), default_t_max(b.spec.n, c.m, 10.0));
  }
  for (const auto& c : figure_plan("2", FigureScale::full).blocks.front().configs) EXPECT_EQ(c.t_max, 0u);
  EXPECT_EQ(f2.blocks.front().runs, 50u);
  EXPECT_EQ(f2.blocks.back().runs, 10u);
  EXPECT_EQ(figure_plan("2", FigureScale::desk, {}, 7).blocks.back().runs, 7u);
  EXPECT_EQ(figure_plan("5", FigureScale::full).blocks.back().spec.k, 6u);

  const auto a1 = figure_plan("A1", FigureScale::desk);
  for (const auto& b : a1.blocks) {
    EXPECT_EQ(b.spec.family, LandscapeFamily::ising_noninteracting);
    bool has_raw = false;
    for (const auto& c : b.configs) {
      if (c.algorithm == Algorithm::raw) {
        has_raw = true;
      } else {
        EXPECT_EQ(c.m, 100u);
        EXPECT_NEAR(c.u * b.spec.n, 0.1, 1e-15);
      }
    }
    EXPECT_TRUE(has_raw);
  }
  EXPECT_THROW(figure_plan("8", FigureScale::desk), ParameterError);
  for (const auto& id : figure_ids()) EXPECT_NO_THROW(figure_plan(id, FigureScale::full));
}

TEST(Figures, RunWritesAllFiles) {
  TempDir dir;
  const auto plan = figure_plan("A2", FigureScale::desk, 1, 20);
  const auto rows = run_figure(plan, dir.path() / "data", 5, 1, dir.path() / "out");
  EXPECT_EQ(rows.size(), 12u);
  for (const char* name : {"results.csv", "trace.csv", "baseline.csv", "fits.csv", "metadata.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;
  }
  const std::string fits = slurp(dir.path() / "out" / "fits.csv");
  EXPECT_NE(fits.find("ising-f,raw,cN^2"), std::string::npos);
  EXPECT_NE(fits.find("ising-f,raw,c*N^g"), std::string::npos);
  const std::string baseline = slurp(dir.path() / "out" / "baseline.csv");
  EXPECT_NE(baseline.find("ising-f,8,0,100,0.0078125,"), std::string::npos);
}

TEST(Figures, EnsemblesAreReusedByPrefix) {
  TempDir dir;
  const LandscapeSpec spec{LandscapeFamily::nk, 10, 2};
  const auto full = obtain_ensemble(spec, 6, 4, dir.path(), false);
  const auto part = obtain_ensemble(spec, 3, 4, dir.path(), false);
  ASSERT_EQ(part.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(part.global_fitness(i), full.global_fitness(i));
  EXPECT_THROW(obtain_ensemble(spec, 3, 5, dir.path(), false), Error);
  EXPECT_EQ(obtain_ensemble(spec, 3, 5, dir.path(), true).size(), 3u);
}

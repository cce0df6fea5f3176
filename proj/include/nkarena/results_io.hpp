#pragma once

// CSV/JSON export of cost tables.
//
//   results.csv   one row per configuration (column order fixed, see
//                 kResultsHeader)
//   trace.csv     one row per configuration and trace time
//   metadata.json plan, seeds, generator, version, flagged rows, failures
//
// Reals are written in shortest round-trip form, so re-importing a file
// gives back bit-identical aggregates.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ensemble.hpp"
#include "error.hpp"
#include "harness.hpp"

namespace nkarena {

inline constexpr const char* kResultsHeader =
    "family,n,k,algorithm,m,u,t_max,landscapes,runs_per_landscape,mean_cost,stderr_cost,mean_tstar,"
    "censored_fraction,success_fraction_final,master_seed";
inline constexpr const char* kTraceHeader = "family,n,k,algorithm,m,u,t,pi_hat,phi_ratio";

inline std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

inline double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error("malformed number '" + text + "'");
  }
  return value;
}

namespace detail {

inline std::string row_key(const CostRow& row) {
  return std::string(to_string(row.spec.family)) + "," + std::to_string(row.spec.n) + "," +
         std::to_string(row.spec.k) + "," + std::string(to_string(row.algorithm)) + "," + std::to_string(row.m) +
         "," + format_real(row.u);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace detail

inline std::string format_results_csv(const std::vector<CostRow>& rows) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const CostRow& r : rows) {
    out << detail::row_key(r) << ',' << r.t_max << ',' << r.landscapes << ',' << r.runs_per_landscape << ','
        << format_real(r.mean_cost) << ',' << format_real(r.stderr_cost) << ',' << format_real(r.mean_tstar) << ','
        << format_real(r.censored_fraction) << ',' << format_real(r.success_fraction_final) << ',' << r.master_seed
        << '\n';
  }
  return out.str();
}

inline std::string format_trace_csv(const std::vector<CostRow>& rows) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const CostRow& r : rows) {
    const std::string key = detail::row_key(r);
    for (std::size_t g = 0; g < r.tau_grid.size(); ++g) {
      out << key << ',' << r.tau_grid[g] << ',' << format_real(r.pi_hat[g]) << ',' << format_real(r.phi_ratio[g])
          << '\n';
    }
  }
  return out.str();
}

inline nlohmann::json metadata_json(const CostTable& table, const ExperimentPlan& plan, const Ensemble& ensemble,
                                    const std::string& baseline = "simulated") {
  nlohmann::json meta;
  meta["tool"] = "nkarena";
  meta["version"] = kVersion;
  meta["generator"] = "philox4x32-10";
  char id[16];
  std::snprintf(id, sizeof id, "0x%08X", static_cast<unsigned>(kGeneratorId));
  meta["generator_id"] = id;
  meta["master_seed"] = plan.master_seed;
  meta["runs_per_landscape"] = plan.runs_per_landscape;
  meta["landscape"] = {{"family", std::string(to_string(ensemble.spec().family))},
                       {"n", ensemble.spec().n},
                       {"k", ensemble.spec().k}};
  meta["ensemble"] = {{"count", ensemble.size()},
                      {"master_seed", ensemble.manifest.master_seed},
                      {"manifest_digest", manifest_digest(ensemble.manifest)}};
  meta["time_convention"] =
      "halting clock: initial population is t=1; trace clock tau=t-1; trace.csv column t is tau";
  meta["blind_search_baseline"] = baseline;
  auto configs = nlohmann::json::array();
  for (const auto& c : plan.configs) {
    configs.push_back({{"algorithm", std::string(to_string(c.algorithm))},
                       {"m", c.m},
                       {"u", c.u},
                       {"t_max", c.resolved_t_max(ensemble.spec().n)}});
  }
  meta["configs"] = configs;
  auto flagged = nlohmann::json::array();
  for (const auto& r : table.rows) {
    if (r.cost_flagged()) {
      flagged.push_back({{"algorithm", std::string(to_string(r.algorithm))},
                         {"m", r.m},
                         {"u", r.u},
                         {"censored_fraction", r.censored_fraction}});
    }
  }
  meta["censored_rows"] = flagged;
  auto failures = nlohmann::json::array();
  for (const auto& f : table.failures) {
    failures.push_back({{"landscape", f.landscape}, {"config", f.config}, {"message", f.message}});
  }
  meta["failures"] = failures;
  return meta;
}

/// Writes results.csv, trace.csv and metadata.json into `dir`.
inline void export_results(const CostTable& table, const ExperimentPlan& plan, const Ensemble& ensemble,
                           const std::filesystem::path& dir, const std::string& baseline = "simulated") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    auto out = detail::open_for_write(path);
    out << text;
    out.close();
    if (!out) throw Error("failed writing " + path.string());
  };
  write(dir / "results.csv", format_results_csv(table.rows));
  write(dir / "trace.csv", format_trace_csv(table.rows));
  write(dir / "metadata.json", metadata_json(table, plan, ensemble, baseline).dump(2) + "\n");
}

/// Reads results.csv (and trace.csv when it sits next to it) back into rows.
inline std::vector<CostRow> import_results(const std::filesystem::path& results_csv) {
  std::ifstream in(results_csv);
  if (!in) throw Error("cannot open " + results_csv.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw Error(results_csv.string() + ": unexpected results header");
  }
  std::vector<CostRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 15) throw Error(results_csv.string() + ": expected 15 columns, got " + std::to_string(f.size()));
    CostRow r;
    r.spec.family = parse_family(f[0]);
    r.spec.n = static_cast<unsigned>(std::stoul(f[1]));
    r.spec.k = static_cast<unsigned>(std::stoul(f[2]));
    r.algorithm = parse_algorithm(f[3]);
    r.m = static_cast<unsigned>(std::stoul(f[4]));
    r.u = parse_real(f[5]);
    r.t_max = std::stoull(f[6]);
    r.landscapes = std::stoul(f[7]);
    r.runs_per_landscape = std::stoul(f[8]);
    r.mean_cost = parse_real(f[9]);
    r.stderr_cost = parse_real(f[10]);
    r.mean_tstar = parse_real(f[11]);
    r.censored_fraction = parse_real(f[12]);
    r.success_fraction_final = parse_real(f[13]);
    r.master_seed = std::stoull(f[14]);
    rows.push_back(std::move(r));
  }

  const auto trace_path = results_csv.parent_path() / "trace.csv";
  std::ifstream trace(trace_path);
  if (trace && std::getline(trace, line) && line == kTraceHeader) {
    while (std::getline(trace, line)) {
      if (line.empty()) continue;
      const auto f = detail::split_csv(line);
      if (f.size() != 9) throw Error(trace_path.string() + ": expected 9 columns");
      const std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[4] + "," + f[5];
      for (CostRow& r : rows) {
        if (detail::row_key(r) == key) {
          r.tau_grid.push_back(std::stoull(f[6]));
          r.pi_hat.push_back(parse_real(f[7]));
          r.phi_ratio.push_back(parse_real(f[8]));
          break;
        }
      }
    }
  }
  return rows;
}

}  // namespace nkarena

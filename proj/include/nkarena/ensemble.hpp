#pragma once

// Landscape ensembles on disk.
//
//   <root>/N{n}_K{k}/landscape_000.nkl ... landscape_{count-1}.nkl
//   <root>/N{n}_K{k}/manifest.txt
//
// Ising landscapes are deterministic, so their directories
// (<root>/ising-ni_N{n}, <root>/ising-f_N{n}) hold only a manifest.

#include <zlib.h>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "ising_landscape.hpp"
#include "landscape.hpp"
#include "landscape_io.hpp"
#include "nk_landscape.hpp"
#include "rng.hpp"

namespace nkarena {

enum class LandscapeFamily { nk, ising_noninteracting, ising_ferromagnetic };

inline std::string_view to_string(LandscapeFamily f) {
  switch (f) {
    case LandscapeFamily::nk: return "nk";
    case LandscapeFamily::ising_noninteracting: return "ising-ni";
    case LandscapeFamily::ising_ferromagnetic: return "ising-f";
  }
  return "?";
}

inline LandscapeFamily parse_family(std::string_view name) {
  if (name == "nk") return LandscapeFamily::nk;
  if (name == "ising-ni") return LandscapeFamily::ising_noninteracting;
  if (name == "ising-f") return LandscapeFamily::ising_ferromagnetic;
  throw ParameterError("unknown landscape family '" + std::string(name) + "'");
}

struct LandscapeSpec {
  LandscapeFamily family = LandscapeFamily::nk;
  unsigned n = 12;
  unsigned k = 0;  // ignored for Ising families

  void validate() const {
    if (family == LandscapeFamily::nk) {
      NkLandscape::validate(n, k);
    } else {
      IsingLandscape(n, IsingVariant::noninteracting);
    }
  }

  /// Number of global maxima (2 for the ferromagnetic ring).
  unsigned global_max_count() const noexcept { return family == LandscapeFamily::ising_ferromagnetic ? 2 : 1; }

  std::string directory_name() const {
    if (family == LandscapeFamily::nk) return "N" + std::to_string(n) + "_K" + std::to_string(k);
    return std::string(to_string(family)) + "_N" + std::to_string(n);
  }

  friend bool operator==(const LandscapeSpec&, const LandscapeSpec&) = default;
};

struct ManifestEntry {
  std::size_t index = 0;
  std::string file;  // "-" when nothing is persisted
  std::uint64_t seed = 0;
  double global_fitness = 0.0;
  std::int64_t local_maxima = -1;  // -1 when N is too large to enumerate
};

struct Manifest {
  LandscapeSpec spec;
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> entries;

  double mean_local_maxima() const {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& e : entries) {
      if (e.local_maxima >= 0) {
        sum += static_cast<double>(e.local_maxima);
        ++used;
      }
    }
    return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used);
  }
};

inline constexpr unsigned kManifestMaximaLimit = 24;

inline std::string format_manifest(const Manifest& manifest) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line,
                "# nkarena-manifest v1 family=%s n=%u k=%u count=%zu master_seed=%" PRIu64 " generator=0x%08" PRIX32
                "\n",
                std::string(to_string(manifest.spec.family)).c_str(), manifest.spec.n, manifest.spec.k,
                manifest.entries.size(), manifest.master_seed, kGeneratorId);
  out << line << "index,file,seed,global_fitness,local_maxima\n";
  for (const auto& e : manifest.entries) {
    std::snprintf(line, sizeof line, "%zu,%s,%" PRIu64 ",%.17g,%" PRId64 "\n", e.index, e.file.c_str(), e.seed,
                  e.global_fitness, e.local_maxima);
    out << line;
  }
  return out.str();
}

inline Manifest parse_manifest(std::istream& in) {
  Manifest manifest;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# nkarena-manifest v1", 0) != 0) {
    throw Error("manifest: missing or unsupported header line");
  }
  std::istringstream header(line.substr(2));
  std::string token;
  std::size_t count = 0;
  while (header >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "family") manifest.spec.family = parse_family(value);
    if (key == "n") manifest.spec.n = static_cast<unsigned>(std::stoul(value));
    if (key == "k") manifest.spec.k = static_cast<unsigned>(std::stoul(value));
    if (key == "count") count = std::stoul(value);
    if (key == "master_seed") manifest.master_seed = std::stoull(value);
  }
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    ManifestEntry e;
    std::string field;
    std::getline(row, field, ',');
    e.index = std::stoul(field);
    std::getline(row, e.file, ',');
    std::getline(row, field, ',');
    e.seed = std::stoull(field);
    std::getline(row, field, ',');
    e.global_fitness = std::stod(field);
    std::getline(row, field, ',');
    e.local_maxima = std::stoll(field);
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.size() != count) {
    throw Error("manifest: header announces " + std::to_string(count) + " landscapes, found " +
                std::to_string(manifest.entries.size()));
  }
  return manifest;
}

/// CRC-32 of the manifest text, as 8 hex digits.
inline std::string manifest_digest(const Manifest& manifest) {
  const std::string text = format_manifest(manifest);
  const auto crc = ::crc32(::crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
                           static_cast<uInt>(text.size()));
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08lx", static_cast<unsigned long>(crc));
  return hex;
}

/// In-memory ensemble: landscapes plus the manifest describing them.
struct Ensemble {
  Manifest manifest;
  std::vector<AnyLandscape> landscapes;

  const LandscapeSpec& spec() const noexcept { return manifest.spec; }
  std::size_t size() const noexcept { return landscapes.size(); }

  double global_fitness(std::size_t i) const {
    return std::visit([](const auto& l) { return l.global_max_fitness(); }, landscapes[i]);
  }
};

inline std::uint64_t ensemble_member_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, StreamTag::ensemble, index);
}

inline std::string landscape_file_name(std::size_t index, std::size_t count) {
  char name[64];
  const int width = count > 1000 ? static_cast<int>(std::to_string(count - 1).size()) : 3;
  std::snprintf(name, sizeof name, "landscape_%0*zu.nkl", width, index);
  return name;
}

/// Generates `count` landscapes from seeds derived from master_seed, with
/// their optimum and (for N <= 24) local-maxima census.
inline Ensemble make_ensemble(const LandscapeSpec& spec, std::size_t count, std::uint64_t master_seed) {
  spec.validate();
  if (count == 0) throw ParameterError("ensemble size must be positive");
  Ensemble ensemble;
  ensemble.manifest.spec = spec;
  ensemble.manifest.master_seed = master_seed;
  if (spec.family != LandscapeFamily::nk) ensemble.manifest.spec.k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    ManifestEntry entry;
    entry.index = i;
    if (spec.family == LandscapeFamily::nk) {
      NkLandscape landscape = generate_nk(spec.n, spec.k, ensemble_member_seed(master_seed, i));
      entry.file = landscape_file_name(i, count);
      entry.seed = landscape.seed();
      entry.global_fitness = landscape.global_max_fitness();
      if (spec.n <= kManifestMaximaLimit) {
        entry.local_maxima = static_cast<std::int64_t>(count_strict_local_maxima(landscape));
      }
      ensemble.landscapes.emplace_back(std::move(landscape));
    } else {
      const IsingLandscape landscape(spec.n, spec.family == LandscapeFamily::ising_noninteracting
                                                 ? IsingVariant::noninteracting
                                                 : IsingVariant::ferromagnetic);
      entry.file = "-";
      entry.global_fitness = landscape.global_max_fitness();
      if (spec.n <= kManifestMaximaLimit) {
        entry.local_maxima = static_cast<std::int64_t>(count_strict_local_maxima(landscape));
      }
      ensemble.landscapes.emplace_back(landscape);
    }
    ensemble.manifest.entries.push_back(std::move(entry));
  }
  return ensemble;
}

inline std::filesystem::path ensemble_directory(const std::filesystem::path& root, const LandscapeSpec& spec) {
  return root / spec.directory_name();
}

/// Generates and persists an ensemble under <root>/<spec dir>. Refuses a
/// non-empty target directory unless `overwrite` is set.
inline Ensemble build_ensemble(const LandscapeSpec& spec, std::size_t count, std::uint64_t master_seed,
                               const std::filesystem::path& root, bool overwrite = false) {
  namespace fs = std::filesystem;
  const fs::path dir = ensemble_directory(root, spec);
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!overwrite) throw Error("ensemble directory " + dir.string() + " is not empty (pass overwrite to replace it)");
    for (const auto& item : fs::directory_iterator(dir)) fs::remove_all(item.path());
  }
  fs::create_directories(dir);
  Ensemble ensemble = make_ensemble(spec, count, master_seed);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (const auto* nk = std::get_if<NkLandscape>(&ensemble.landscapes[i])) {
      save_landscape(*nk, dir / ensemble.manifest.entries[i].file);
    }
  }
  std::ofstream out(dir / "manifest.txt", std::ios::trunc);
  out << format_manifest(ensemble.manifest);
  if (!out) throw Error("failed writing " + (dir / "manifest.txt").string());
  return ensemble;
}

/// Loads an ensemble directory (the one holding manifest.txt).
inline Ensemble load_ensemble(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw Error("no manifest.txt in ensemble directory " + dir.string());
  Ensemble ensemble;
  ensemble.manifest = parse_manifest(in);
  const LandscapeSpec& spec = ensemble.manifest.spec;
  spec.validate();
  for (const auto& entry : ensemble.manifest.entries) {
    if (spec.family == LandscapeFamily::nk) {
      NkLandscape landscape = load_landscape(dir / entry.file);
      if (landscape.n() != spec.n || landscape.k() != spec.k || landscape.seed() != entry.seed) {
        throw Error("landscape " + (dir / entry.file).string() + " does not match its manifest row");
      }
      ensemble.landscapes.emplace_back(std::move(landscape));
    } else {
      ensemble.landscapes.emplace_back(IsingLandscape(
          spec.n, spec.family == LandscapeFamily::ising_noninteracting ? IsingVariant::noninteracting
                                                                       : IsingVariant::ferromagnetic));
    }
  }
  return ensemble;
}

}  // namespace nkarena

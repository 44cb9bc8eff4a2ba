#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "blackout/engine_config.hpp"
#include "blackout/grid_model.hpp"
#include "blackout/matpower.hpp"
#include "blackout/risk.hpp"
#include "blackout/sample_set.hpp"

namespace blackout::app {

inline constexpr int kManifestFormatVersion = 1;

/// A directory holding one study:
///   network.json   canonical network
///   config.json    engine configuration
///   samples.jsonl  sample set (header line + one sample per line)
///   matrices.bin   cached P/Q factors of the sample set
///   manifest.json  hashes, seed and counts tying the files together
class Workspace {
 public:
  explicit Workspace(std::filesystem::path dir);

  /// Imports a MATPOWER case into `dir` (created if missing). Writes a
  /// default config unless one exists or `config` is given. Discards
  /// samples and caches drawn for another network.
  static Workspace import_case(const std::filesystem::path& dir, const std::string& case_path,
                               const MatpowerImportOptions& options, const std::optional<EngineConfig>& config = {});

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path network_path() const { return dir_ / "network.json"; }
  std::filesystem::path config_path() const { return dir_ / "config.json"; }
  std::filesystem::path samples_path() const { return dir_ / "samples.jsonl"; }
  std::filesystem::path matrices_path() const { return dir_ / "matrices.bin"; }
  std::filesystem::path manifest_path() const { return dir_ / "manifest.json"; }

  const Network& network() const { return network_; }
  const EngineConfig& config() const { return config_; }
  const nlohmann::json& manifest() const { return manifest_; }

  std::string network_hash() const;
  /// Hash recorded by sample sets drawn under the current config.
  std::string model_hash() const;
  std::string config_hash() const;

  CascadeSimulator simulator() const;

  bool has_samples() const;
  /// Sample-file header, if any.
  std::optional<nlohmann::json> sample_header() const;
  /// Loads the sample set; throws ValidationError if it was drawn under a
  /// different network or failure model than the current files describe.
  SampleSet load_current_samples() const;

  struct SimulateOutcome {
    std::size_t before = 0;
    std::size_t after = 0;
    std::uint64_t master_seed = 0;
    bool fresh = false;
  };
  /// Ensures at least `n` samples drawn from `seed`. Extends an existing set
  /// from the same seed; a set from another seed or a stale model is only
  /// replaced when `fresh` is set.
  SimulateOutcome simulate(std::size_t n, std::uint64_t seed, unsigned workers, bool fresh);

  /// Stores a (grown) sample set and refreshes the manifest.
  void store_samples(const SampleSet& set);

  /// Risk matrices of the current samples at `y0`. Uses matrices.bin when its
  /// key matches; otherwise rebuilds, and writes the cache if `write_cache`.
  RiskMatrices matrices(double y0, bool write_cache = true);

  /// Key of the matrices cache for the current samples and config.
  std::string matrices_key(const nlohmann::json& sample_header) const;

 private:
  void load();
  void write_manifest();

  std::filesystem::path dir_;
  Network network_;
  EngineConfig config_;
  nlohmann::json manifest_;
};

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes through a temporary file renamed into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace blackout::app

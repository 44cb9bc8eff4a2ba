#include "workspace.hpp"

#include <fstream>
#include <sstream>

#include "blackout/error.hpp"
#include "blackout/hashing.hpp"
#include "blackout/network_json.hpp"

namespace blackout::app {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.filename().string(), 0, e.byte, e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Workspace::Workspace(std::filesystem::path dir) : dir_(std::move(dir)) { load(); }

void Workspace::load() {
  if (!std::filesystem::exists(network_path()))
    throw ValidationError("no workspace at " + dir_.string() + " (run import first)");
  network_ = network_from_json(read_json_file(network_path()));
  config_ = std::filesystem::exists(config_path()) ? EngineConfig::from_json(read_json_file(config_path()))
                                                   : EngineConfig{};
  manifest_ = std::filesystem::exists(manifest_path()) ? read_json_file(manifest_path()) : nlohmann::json::object();
}

Workspace Workspace::import_case(const std::filesystem::path& dir, const std::string& case_path,
                                 const MatpowerImportOptions& options, const std::optional<EngineConfig>& config) {
  std::filesystem::create_directories(dir);
  const Network net = load_matpower(case_path, options);
  const std::string text = to_json(net);
  const auto network_file = dir / "network.json";
  bool changed = true;
  if (std::filesystem::exists(network_file)) {
    try {
      changed = network_from_json(read_json_file(network_file)) != net;
    } catch (const Error&) {
      changed = true;
    }
  }
  write_text_file(network_file, text + "\n");
  if (config) write_text_file(dir / "config.json", config->to_json().dump(2) + "\n");
  else if (!std::filesystem::exists(dir / "config.json"))
    write_text_file(dir / "config.json", EngineConfig{}.to_json().dump(2) + "\n");
  if (changed) {
    std::filesystem::remove(dir / "samples.jsonl");
    std::filesystem::remove(dir / "matrices.bin");
  }
  Workspace ws(dir);
  ws.manifest_["source"] = case_path;
  ws.write_manifest();
  return ws;
}

std::string Workspace::network_hash() const { return json_digest(network_to_json(network_)); }

CascadeSimulator Workspace::simulator() const {
  return CascadeSimulator(network_, config_.failure_model(network_), config_.cascade);
}

std::string Workspace::model_hash() const { return simulator().model_hash(); }

std::string Workspace::config_hash() const { return json_digest(config_.to_json()); }

bool Workspace::has_samples() const { return std::filesystem::exists(samples_path()); }

std::optional<nlohmann::json> Workspace::sample_header() const {
  if (!has_samples()) return std::nullopt;
  return load_sample_header(samples_path().string());
}

SampleSet Workspace::load_current_samples() const {
  auto set = load_samples(samples_path().string());
  if (set.network_hash != network_hash())
    throw ValidationError("samples were drawn for a different network; run simulate --fresh");
  if (set.model_hash != model_hash())
    throw ValidationError("samples were drawn under a different failure model or cascade options; run simulate --fresh");
  return set;
}

Workspace::SimulateOutcome Workspace::simulate(std::size_t n, std::uint64_t seed, unsigned workers, bool fresh) {
  if (n < 1) throw ValidationError("--n must be >= 1");
  const auto sim = simulator();
  SimulateOutcome out;
  out.master_seed = seed;
  if (const auto header = sample_header(); header && !fresh) {
    const bool same_seed = (*header)["master_seed"].get<std::uint64_t>() == seed;
    const bool current = (*header)["network_hash"] == sim.network_hash() && (*header)["model_hash"] == sim.model_hash();
    if (!current)
      throw ValidationError("existing samples were drawn under a different network or model; rerun with --fresh");
    if (!same_seed)
      throw ValidationError("existing samples use master seed " + (*header)["master_seed"].dump() +
                            "; rerun with that seed to extend them, or with --fresh to replace them");
    out.before = (*header)["count"].get<std::size_t>();
    if (out.before >= n) {
      out.after = out.before;
      write_manifest();
      return out;
    }
    auto set = load_samples(samples_path().string());
    extend_samples(sim, set, n, workers);
    out.after = set.count();
    store_samples(set);
    return out;
  }
  out.fresh = true;
  const auto set = generate_samples(sim, n, seed, workers);
  out.after = set.count();
  store_samples(set);
  return out;
}

void Workspace::store_samples(const SampleSet& set) {
  save_samples(set, samples_path().string());
  write_manifest();
}

std::string Workspace::matrices_key(const nlohmann::json& header) const {
  return json_digest(nlohmann::json{{"network_hash", header["network_hash"]},
                                    {"model_hash", header["model_hash"]},
                                    {"master_seed", header["master_seed"]},
                                    {"count", header["count"]},
                                    {"config_hash", config_hash()},
                                    {"components", network_.maintainable_ids()}});
}

RiskMatrices Workspace::matrices(double y0, bool write_cache) {
  const auto header = sample_header();
  if (!header) throw ValidationError("workspace has no samples (run simulate first)");
  if ((*header)["network_hash"] != network_hash() || (*header)["model_hash"] != model_hash())
    throw ValidationError("samples were drawn under a different network or failure model; run simulate --fresh");
  const std::string key = matrices_key(*header);
  const auto cached = manifest_.find("matrices");
  if (cached != manifest_.end() && cached->value("key", "") == key && std::filesystem::exists(matrices_path())) {
    auto m = load_matrices(matrices_path().string());
    m.set_y0(y0);
    return m;
  }
  const auto set = load_current_samples();
  auto m = build_matrices(set, config_.failure_model(network_), config_.maintenance, y0, network_.maintainable_ids());
  if (write_cache) {
    save_matrices(m, matrices_path().string());
    manifest_["matrices"] = {{"key", key}, {"count", m.n}, {"components", m.components()}};
    write_manifest();
  }
  return m;
}

void Workspace::write_manifest() {
  manifest_["format_version"] = kManifestFormatVersion;
  manifest_["network_hash"] = network_hash();
  manifest_["config_hash"] = config_hash();
  manifest_["model_hash"] = model_hash();
  manifest_["maintainable_components"] = network_.maintainable_ids().size();
  if (const auto header = sample_header()) {
    manifest_["samples"] = {{"count", (*header)["count"]},
                            {"master_seed", (*header)["master_seed"]},
                            {"network_hash", (*header)["network_hash"]},
                            {"model_hash", (*header)["model_hash"]}};
    if (manifest_.contains("matrices") && manifest_["matrices"].value("key", "") != matrices_key(*header))
      manifest_.erase("matrices");
  } else {
    manifest_.erase("samples");
    manifest_.erase("matrices");
  }
  write_text_file(manifest_path(), manifest_.dump(2) + "\n");
}

}  // namespace blackout::app

#include "blackout/engine_config.hpp"

#include <set>

#include "blackout/error.hpp"

namespace blackout {

nlohmann::json EngineConfig::to_json() const {
  nlohmann::json over = nlohmann::json::object();
  for (const auto& [id, p] : overrides) over[std::to_string(id)] = params_to_json(p);
  return {{"format_version", kConfigFormatVersion},
          {"failure_model", {{"line", params_to_json(line)}, {"transformer", params_to_json(transformer)}, {"overrides", over}}},
          {"maintenance", maintenance.to_json()},
          {"stage_cap", cascade.stage_cap},
          {"full_traces", cascade.full_traces},
          {"lp_weights", {{"shed", cascade.weights.shed}, {"redispatch", cascade.weights.redispatch}}}};
}

namespace {

void reject_unknown(const nlohmann::json& doc, const std::string& path, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : doc.items())
    if (!allowed.contains(key)) throw SchemaError(path + "." + key, "unknown field");
}

double number(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_number()) throw SchemaError(path, "expected a number");
  return doc.get<double>();
}

}  // namespace

EngineConfig EngineConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  reject_unknown(doc, "$", {"format_version", "failure_model", "maintenance", "stage_cap", "full_traces", "lp_weights"});
  if (doc.contains("format_version") && doc["format_version"] != kConfigFormatVersion)
    throw SchemaError("$.format_version", "unsupported config format version " + doc["format_version"].dump());

  EngineConfig cfg;
  if (const auto it = doc.find("failure_model"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("$.failure_model", "expected an object");
    reject_unknown(*it, "$.failure_model", {"line", "transformer", "overrides"});
    if (it->contains("line")) cfg.line = params_from_json((*it)["line"], "$.failure_model.line");
    if (it->contains("transformer"))
      cfg.transformer = params_from_json((*it)["transformer"], "$.failure_model.transformer");
    if (it->contains("overrides")) {
      const auto& over = (*it)["overrides"];
      if (!over.is_object()) throw SchemaError("$.failure_model.overrides", "expected an object keyed by branch id");
      for (const auto& [key, value] : over.items()) {
        const std::string path = "$.failure_model.overrides." + key;
        int id = 0;
        try {
          std::size_t used = 0;
          id = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw SchemaError(path, "expected an integer branch id as key");
        }
        cfg.overrides[id] = params_from_json(value, path);
      }
    }
  }
  if (doc.contains("maintenance")) cfg.maintenance = MaintenanceEffect::from_json(doc["maintenance"], "$.maintenance");
  if (doc.contains("stage_cap")) {
    const auto& v = doc["stage_cap"];
    if (!v.is_number_integer() || v.get<long long>() < 1) throw SchemaError("$.stage_cap", "expected an integer >= 1");
    cfg.cascade.stage_cap = v.get<int>();
  }
  if (doc.contains("full_traces")) {
    if (!doc["full_traces"].is_boolean()) throw SchemaError("$.full_traces", "expected a boolean");
    cfg.cascade.full_traces = doc["full_traces"].get<bool>();
  }
  if (const auto it = doc.find("lp_weights"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("$.lp_weights", "expected an object");
    reject_unknown(*it, "$.lp_weights", {"shed", "redispatch"});
    if (it->contains("shed")) cfg.cascade.weights.shed = number((*it)["shed"], "$.lp_weights.shed");
    if (it->contains("redispatch"))
      cfg.cascade.weights.redispatch = number((*it)["redispatch"], "$.lp_weights.redispatch");
    if (!(cfg.cascade.weights.shed > 0.0) || !(cfg.cascade.weights.redispatch >= 0.0))
      throw SchemaError("$.lp_weights", "shed weight must be > 0 and redispatch weight >= 0");
  }
  return cfg;
}

}  // namespace blackout

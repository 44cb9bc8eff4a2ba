#include "blackout/failure_model.hpp"

#include <cmath>

#include "blackout/error.hpp"
#include "blackout/hashing.hpp"

namespace blackout {

void check(const FailureParams& p, const std::string& who) {
  if (!(0.0 <= p.p_base && p.p_base <= p.p_peak && p.p_peak <= 1.0))
    throw ValidationError(who + ": failure parameters need 0 <= p_base <= p_peak <= 1");
  if (!(0.0 <= p.ell_knee && p.ell_knee < p.ell_sat) || !std::isfinite(p.ell_sat))
    throw ValidationError(who + ": failure parameters need 0 <= ell_knee < ell_sat");
}

FailureParams MaintenanceEffect::apply(const FailureParams& baseline) const {
  if (mode == MaintenanceMode::replace) return replacement;
  FailureParams p = baseline;
  p.p_base *= scale_factor;
  p.p_peak *= scale_factor;
  return p;
}

void MaintenanceEffect::check() const {
  if (mode == MaintenanceMode::scale) {
    if (!(scale_factor > 0.0 && scale_factor <= 1.0))
      throw ValidationError("maintenance scale_factor must lie in (0, 1]");
  } else {
    blackout::check(replacement, "maintenance replacement");
  }
}

nlohmann::json MaintenanceEffect::to_json() const {
  if (mode == MaintenanceMode::scale) return {{"mode", "scale"}, {"scale_factor", scale_factor}};
  return {{"mode", "replace"}, {"replacement", params_to_json(replacement)}};
}

MaintenanceEffect MaintenanceEffect::from_json(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  const auto mode = doc.value("mode", std::string("scale"));
  MaintenanceEffect effect;
  if (mode == "scale") {
    const auto it = doc.find("scale_factor");
    if (it != doc.end()) {
      if (!it->is_number()) throw SchemaError(path + ".scale_factor", "expected a number");
      effect.scale_factor = it->get<double>();
    }
  } else if (mode == "replace") {
    if (!doc.contains("replacement")) throw SchemaError(path + ".replacement", "missing required field");
    effect = MaintenanceEffect::replace(params_from_json(doc["replacement"], path + ".replacement"));
  } else {
    throw SchemaError(path + ".mode", "expected \"scale\" or \"replace\"");
  }
  effect.check();
  return effect;
}

FailureModel::FailureModel(std::map<int, FailureParams> per_component) : params_(std::move(per_component)) {
  for (const auto& [id, p] : params_) check(p, "component " + std::to_string(id));
}

FailureModel FailureModel::for_network(const Network& net, const FailureParams& line,
                                       const FailureParams& transformer,
                                       const std::map<int, FailureParams>& overrides) {
  std::map<int, FailureParams> params;
  for (const auto& br : net.branches) params[br.id] = br.kind == BranchKind::transformer ? transformer : line;
  for (const auto& [id, p] : overrides) {
    if (!params.contains(id))
      throw ValidationError("failure-model override for unknown branch " + std::to_string(id));
    params[id] = p;
  }
  return FailureModel(std::move(params));
}

const FailureParams& FailureModel::params(int id) const {
  const auto it = params_.find(id);
  if (it == params_.end()) throw Error("no failure model for component " + std::to_string(id));
  return it->second;
}

double FailureModel::probability(int id, double loading_ratio) const {
  return params(id).probability(loading_ratio);
}

FailureModel FailureModel::with_maintenance(const MaintenanceEffect& effect, std::span<const int> ids) const {
  FailureModel out = *this;
  for (int id : ids) out.params_[id] = effect.apply(params(id));
  return out;
}

nlohmann::json FailureModel::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [id, p] : params_) doc[std::to_string(id)] = params_to_json(p);
  return doc;
}

std::string FailureModel::digest() const { return json_digest(to_json()); }

double failure_probability(const FailureModel& model, int branch, double loading_ratio) {
  if (!(loading_ratio >= 0.0)) throw ValidationError("loading ratio must be >= 0");
  return model.probability(branch, loading_ratio);
}

nlohmann::json params_to_json(const FailureParams& p) {
  return {{"p_base", p.p_base}, {"p_peak", p.p_peak}, {"ell_knee", p.ell_knee}, {"ell_sat", p.ell_sat}};
}

FailureParams params_from_json(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  auto get = [&](const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) throw SchemaError(path + "." + key, "missing required field");
    if (!it->is_number()) throw SchemaError(path + "." + key, "expected a number");
    return it->get<double>();
  };
  FailureParams p{get("p_base"), get("p_peak"), get("ell_knee"), get("ell_sat")};
  check(p, path);
  return p;
}

}  // namespace blackout

#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "blackout/cascade.hpp"
#include "blackout/failure_model.hpp"
#include "blackout/grid_model.hpp"

namespace blackout {

inline constexpr int kConfigFormatVersion = 1;

/// Everything that shapes a sample set or its reweighting, short of the
/// network itself. Mirrors the workspace config file.
struct EngineConfig {
  FailureParams line = kDefaultLineParams;
  FailureParams transformer = kDefaultTransformerParams;
  std::map<int, FailureParams> overrides;
  MaintenanceEffect maintenance{};
  CascadeOptions cascade{};

  FailureModel failure_model(const Network& net) const { return FailureModel::for_network(net, line, transformer, overrides); }

  nlohmann::json to_json() const;
  /// Missing keys take their defaults; unknown keys are rejected.
  static EngineConfig from_json(const nlohmann::json& doc);

  bool operator==(const EngineConfig&) const = default;
};

}  // namespace blackout

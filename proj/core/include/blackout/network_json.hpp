#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "blackout/grid_model.hpp"

namespace blackout {

inline constexpr int kNetworkFormatVersion = 1;

nlohmann::json network_to_json(const Network& net);

/// Throws SchemaError naming the JSON path of the first problem, then
/// ValidationError if the decoded network violates an invariant.
Network network_from_json(const nlohmann::json& doc);

std::string to_json(const Network& net);
Network from_json(std::string_view text);

}  // namespace blackout

#pragma once

#include <json.hpp>

#include "blackout/credibility.hpp"
#include "blackout/optimizer.hpp"
#include "blackout/risk.hpp"
#include "workspace.hpp"

namespace blackout::app {

// JSON answers shared by the CLI and the HTTP service, so both print the
// same numbers for the same query.

nlohmann::json network_summary(const Network& net);

nlohmann::json risk_answer(const RiskMatrices& m, const Strategy& s, double beta, double eps_bar);

nlohmann::json stats_answer(const RiskMatrices& m, const nlohmann::json& manifest);

/// Parses a list of component ids: JSON array of integers.
Strategy strategy_from_json(const nlohmann::json& ids, const std::string& path);

}  // namespace blackout::app

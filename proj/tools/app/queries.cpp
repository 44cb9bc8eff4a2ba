#include "queries.hpp"

#include "blackout/error.hpp"

namespace blackout::app {

nlohmann::json network_summary(const Network& net) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& br : net.branches) {
    if (!br.maintainable) continue;
    comps.push_back({{"id", br.id},
                     {"kind", to_string(br.kind)},
                     {"from_bus", br.from_bus},
                     {"to_bus", br.to_bus},
                     {"flow_limit", br.flow_limit}});
  }
  return {{"base_mva", net.base_mva},
          {"buses", net.buses.size()},
          {"branches", net.branches.size()},
          {"lines", net.line_count()},
          {"transformers", net.transformer_count()},
          {"generators", net.generators.size()},
          {"loads", net.loads.size()},
          {"total_demand", net.total_demand()},
          {"maintainable", comps}};
}

nlohmann::json risk_answer(const RiskMatrices& m, const Strategy& s, double beta, double eps_bar) {
  const double baseline = estimate_risk(m);
  const auto rep = credibility_report(m, s, beta, eps_bar);
  auto doc = to_json(rep);
  doc["maintained"] = strategy_to_json(s);
  doc["y0"] = m.y0;
  doc["baseline_risk"] = baseline;
  doc["reduction_ratio"] = baseline > 0.0 ? 1.0 - rep.risk / baseline : 0.0;
  return doc;
}

nlohmann::json stats_answer(const RiskMatrices& m, const nlohmann::json& manifest) {
  std::size_t above = 0;
  for (double c : m.c)
    if (c > 0.0) ++above;
  return {{"n", m.n},
          {"y0", m.y0},
          {"baseline_risk", estimate_risk(m)},
          {"samples_at_or_above_y0", above},
          {"components", m.components()},
          {"manifest", manifest}};
}

Strategy strategy_from_json(const nlohmann::json& ids, const std::string& path) {
  if (!ids.is_array()) throw SchemaError(path, "expected an array of component ids");
  Strategy s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!ids[i].is_number_integer())
      throw SchemaError(path + "[" + std::to_string(i) + "]", "expected an integer component id");
    s.maintained.push_back(ids[i].get<int>());
  }
  return s;
}

}  // namespace blackout::app

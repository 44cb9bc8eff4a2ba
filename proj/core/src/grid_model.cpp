#include "blackout/grid_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "blackout/error.hpp"

namespace blackout {

const char* to_string(BranchKind kind) {
  return kind == BranchKind::transformer ? "transformer" : "line";
}

std::optional<BranchKind> branch_kind_from_string(std::string_view text) {
  if (text == "line") return BranchKind::line;
  if (text == "transformer") return BranchKind::transformer;
  return std::nullopt;
}

double Network::total_demand() const {
  return std::accumulate(loads.begin(), loads.end(), 0.0,
                         [](double acc, const Load& l) { return acc + l.demand; });
}

double Network::total_dispatch() const {
  return std::accumulate(generators.begin(), generators.end(), 0.0,
                         [](double acc, const Generator& g) { return acc + g.dispatch; });
}

std::optional<std::size_t> Network::bus_index(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == bus_id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Network::branch_index(int branch_id) const {
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (branches[i].id == branch_id) return i;
  return std::nullopt;
}

std::vector<int> Network::maintainable_ids() const {
  std::vector<int> ids;
  for (const auto& br : branches)
    if (br.maintainable) ids.push_back(br.id);
  return ids;
}

std::size_t Network::transformer_count() const {
  std::size_t n = 0;
  for (const auto& br : branches) n += br.kind == BranchKind::transformer;
  return n;
}

std::size_t Network::line_count() const { return branches.size() - transformer_count(); }

NetworkIndex::NetworkIndex(const Network& net) {
  bus_pos.reserve(net.buses.size());
  for (std::size_t i = 0; i < net.buses.size(); ++i) bus_pos.emplace(net.buses[i].id, i);
  auto pos = [&](int bus, const std::string& what) {
    auto it = bus_pos.find(bus);
    if (it == bus_pos.end())
      throw ValidationError(what + " references unknown bus " + std::to_string(bus));
    return it->second;
  };
  for (std::size_t i = 0; i < net.branches.size(); ++i) {
    const auto& br = net.branches[i];
    branch_pos.emplace(br.id, i);
    branch_from.push_back(pos(br.from_bus, "branch " + std::to_string(br.id)));
    branch_to.push_back(pos(br.to_bus, "branch " + std::to_string(br.id)));
  }
  for (const auto& g : net.generators) gen_bus.push_back(pos(g.bus, "generator"));
  for (const auto& l : net.loads) load_bus.push_back(pos(l.bus, "load"));
}

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](std::string entity, std::string invariant) {
    out.push_back({std::move(entity), std::move(invariant)});
  };

  if (!(net.base_mva > 0.0) || !std::isfinite(net.base_mva))
    add("network", "base_mva must be positive and finite");

  std::unordered_set<int> bus_ids;
  for (const auto& bus : net.buses) {
    const std::string who = "bus " + std::to_string(bus.id);
    if (bus.id < 1) add(who, "bus id must be >= 1");
    if (!bus_ids.insert(bus.id).second) add(who, "duplicate bus id");
  }

  std::unordered_set<int> branch_ids;
  for (const auto& br : net.branches) {
    const std::string who = "branch " + std::to_string(br.id);
    if (!branch_ids.insert(br.id).second) add(who, "duplicate branch id");
    if (!bus_ids.contains(br.from_bus))
      add(who, "from_bus " + std::to_string(br.from_bus) + " does not exist");
    if (!bus_ids.contains(br.to_bus))
      add(who, "to_bus " + std::to_string(br.to_bus) + " does not exist");
    if (br.from_bus == br.to_bus) add(who, "branch endpoints must differ");
    if (br.reactance == 0.0 || !std::isfinite(br.reactance)) add(who, "reactance must be nonzero");
    if (!(br.flow_limit > 0.0) || !std::isfinite(br.flow_limit))
      add(who, "flow_limit must be strictly positive");
  }

  bool has_capacity = false;
  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    const auto& g = net.generators[i];
    const std::string who = "generator " + std::to_string(i) + " at bus " + std::to_string(g.bus);
    if (!bus_ids.contains(g.bus)) add(who, "bus does not exist");
    if (g.p_min < 0.0) add(who, "p_min must be >= 0");
    if (!(g.p_min <= g.dispatch && g.dispatch <= g.p_max))
      add(who, "dispatch must lie in [p_min, p_max]");
    if (g.p_max > 0.0) has_capacity = true;
  }
  if (!has_capacity) add("network", "at least one generator must have positive capacity");

  for (std::size_t i = 0; i < net.loads.size(); ++i) {
    const auto& l = net.loads[i];
    const std::string who = "load " + std::to_string(i) + " at bus " + std::to_string(l.bus);
    if (!bus_ids.contains(l.bus)) add(who, "bus does not exist");
    if (!(l.demand >= 0.0)) add(who, "demand must be >= 0");
    if (!(0.0 <= l.served && l.served <= l.demand)) add(who, "served must lie in [0, demand]");
  }
  return out;
}

void require_valid(const Network& net) {
  const auto violations = validate(net);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "network invariant violation";
  for (const auto& v : violations) msg << "; " << v.entity << ": " << v.invariant;
  throw ValidationError(msg.str());
}

}  // namespace blackout

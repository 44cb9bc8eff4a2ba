#include "blackout/network_json.hpp"

#include "blackout/error.hpp"

namespace blackout {

using nlohmann::json;

nlohmann::json network_to_json(const Network& net) {
  json doc;
  doc["format_version"] = kNetworkFormatVersion;
  doc["base_mva"] = net.base_mva;
  auto& buses = doc["buses"] = json::array();
  for (const auto& b : net.buses) buses.push_back({{"id", b.id}, {"name", b.name}});
  auto& branches = doc["branches"] = json::array();
  for (const auto& br : net.branches)
    branches.push_back({{"id", br.id},
                        {"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"reactance", br.reactance},
                        {"flow_limit", br.flow_limit},
                        {"kind", to_string(br.kind)},
                        {"maintainable", br.maintainable}});
  auto& gens = doc["generators"] = json::array();
  for (const auto& g : net.generators)
    gens.push_back({{"bus", g.bus}, {"p_max", g.p_max}, {"p_min", g.p_min}, {"dispatch", g.dispatch}});
  auto& loads = doc["loads"] = json::array();
  for (const auto& l : net.loads) loads.push_back({{"bus", l.bus}, {"demand", l.demand}, {"served", l.served}});
  return doc;
}

namespace {

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  return v.get<int>();
}

const json& array(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

std::string item(const std::string& path, const std::string& key, std::size_t i) {
  return path + "." + key + "[" + std::to_string(i) + "]";
}

}  // namespace

Network network_from_json(const nlohmann::json& doc) {
  const std::string root = "$";
  if (!doc.is_object()) throw SchemaError(root, "expected an object");
  if (doc.contains("format_version")) {
    const auto& v = doc["format_version"];
    if (!v.is_number_integer() || v.get<int>() != kNetworkFormatVersion)
      throw SchemaError("$.format_version", "unsupported format version");
  }

  Network net;
  net.base_mva = number(doc, "base_mva", root);

  const auto& buses = array(doc, "buses", root);
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const auto path = item(root, "buses", i);
    Bus b;
    b.id = integer(buses[i], "id", path);
    const auto& name = member(buses[i], "name", path);
    if (!name.is_string()) throw SchemaError(path + ".name", "expected a string");
    b.name = name.get<std::string>();
    net.buses.push_back(std::move(b));
  }

  const auto& branches = array(doc, "branches", root);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto path = item(root, "branches", i);
    Branch br;
    br.id = integer(branches[i], "id", path);
    br.from_bus = integer(branches[i], "from_bus", path);
    br.to_bus = integer(branches[i], "to_bus", path);
    br.reactance = number(branches[i], "reactance", path);
    br.flow_limit = number(branches[i], "flow_limit", path);
    const auto& kind = member(branches[i], "kind", path);
    const auto parsed = kind.is_string() ? branch_kind_from_string(kind.get<std::string>()) : std::nullopt;
    if (!parsed) throw SchemaError(path + ".kind", "expected \"line\" or \"transformer\"");
    br.kind = *parsed;
    const auto& maint = member(branches[i], "maintainable", path);
    if (!maint.is_boolean()) throw SchemaError(path + ".maintainable", "expected a boolean");
    br.maintainable = maint.get<bool>();
    net.branches.push_back(br);
  }

  const auto& gens = array(doc, "generators", root);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const auto path = item(root, "generators", i);
    net.generators.push_back(Generator{integer(gens[i], "bus", path), number(gens[i], "p_max", path),
                                       number(gens[i], "p_min", path), number(gens[i], "dispatch", path)});
  }

  const auto& loads = array(doc, "loads", root);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const auto path = item(root, "loads", i);
    net.loads.push_back(
        Load{integer(loads[i], "bus", path), number(loads[i], "demand", path), number(loads[i], "served", path)});
  }

  require_valid(net);
  return net;
}

std::string to_json(const Network& net) { return network_to_json(net).dump(2); }

Network from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return network_from_json(doc);
}

}  // namespace blackout

#include "blackout/matpower.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "blackout/dc_flow.hpp"
#include "blackout/error.hpp"

namespace blackout {
namespace {

using Matrix = std::vector<std::vector<double>>;

// Removes `%` comments while leaving quoted strings intact.
std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_quote = false;
  bool in_comment = false;
  for (char c : text) {
    if (in_comment) {
      if (c == '\n') {
        in_comment = false;
        out.push_back(c);
      }
      continue;
    }
    if (c == '\'') in_quote = !in_quote;
    if (c == '\n') in_quote = false;
    if (c == '%' && !in_quote) {
      in_comment = true;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

// Body text between `<name> = [` (or `{`) and the matching close bracket.
std::optional<std::string> block_body(const std::string& text, const std::string& name, char open, char close) {
  const std::regex head("\\b\\w+\\." + name + "\\s*=\\s*\\" + std::string(1, open));
  std::smatch m;
  if (!std::regex_search(text, m, head)) return std::nullopt;
  const auto start = static_cast<std::size_t>(m.position(0) + m.length(0));
  const auto end = text.find(close, start);
  if (end == std::string::npos) return std::nullopt;
  return text.substr(start, end - start);
}

Matrix parse_matrix(const std::string& text, const std::string& name, std::size_t min_columns) {
  const auto body = block_body(text, name, '[', ']');
  if (!body) throw ParseError(name, 0, 0, "matrix block `" + name + "` not found");

  Matrix rows;
  std::string row_text;
  auto flush = [&]() {
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t column = 0;
    while (pos < row_text.size()) {
      while (pos < row_text.size() && (std::isspace(static_cast<unsigned char>(row_text[pos])) || row_text[pos] == ','))
        ++pos;
      if (pos >= row_text.size()) break;
      auto end = pos;
      while (end < row_text.size() && !std::isspace(static_cast<unsigned char>(row_text[end])) && row_text[end] != ',')
        ++end;
      ++column;
      const std::string_view token(row_text.data() + pos, end - pos);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(name, rows.size() + 1, column, "cannot parse `" + std::string(token) + "` as a number");
      row.push_back(value);
      pos = end;
    }
    row_text.clear();
    if (row.empty()) return;
    if (row.size() < min_columns)
      throw ParseError(name, rows.size() + 1, row.size() + 1,
                       "expected at least " + std::to_string(min_columns) + " columns, found " +
                           std::to_string(row.size()));
    rows.push_back(std::move(row));
  };
  for (char c : *body) {
    if (c == ';' || c == '\n') flush();
    else row_text.push_back(c);
  }
  flush();
  return rows;
}

double parse_scalar(const std::string& text, const std::string& name) {
  const std::regex re("\\b\\w+\\." + name + "\\s*=\\s*([-+0-9.eE]+)\\s*;");
  std::smatch m;
  if (!std::regex_search(text, m, re)) throw ParseError(name, 0, 0, "scalar `" + name + "` not found");
  double value = 0.0;
  const auto s = m[1].str();
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(name, 1, 1, "cannot parse `" + s + "`");
  return value;
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> names;
  const auto body = block_body(text, "bus_name", '{', '}');
  if (!body) return names;
  const std::regex item("'([^']*)'");
  for (auto it = std::sregex_iterator(body->begin(), body->end(), item); it != std::sregex_iterator(); ++it)
    names.push_back((*it)[1].str());
  return names;
}

int as_id(double v, const std::string& block, std::size_t row, std::size_t column) {
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError(block, row, column, "expected an integer bus number");
  return static_cast<int>(v);
}

bool is_maintainable(BranchKind kind, MaintainableSelection sel) {
  switch (sel) {
    case MaintainableSelection::transformers: return kind == BranchKind::transformer;
    case MaintainableSelection::lines: return kind == BranchKind::line;
    case MaintainableSelection::all: return true;
    case MaintainableSelection::none: return false;
  }
  return false;
}

// Proportional rescaling of the case dispatch to a target total, with
// generators that would leave [p_min, p_max] pinned at the violated limit.
void rescale_dispatch(std::vector<Generator>& gens, double target) {
  std::vector<double> weight(gens.size());
  double pg_total = 0.0;
  for (const auto& g : gens) pg_total += g.dispatch;
  for (std::size_t i = 0; i < gens.size(); ++i)
    weight[i] = pg_total > 0.0 ? gens[i].dispatch : gens[i].p_max;

  std::vector<bool> pinned(gens.size(), false);
  double remaining = target;
  while (true) {
    double free_weight = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (!pinned[i]) free_weight += weight[i];
    if (free_weight <= 0.0) {
      // Every weighted unit is pinned; spread what is left over unpinned units by headroom.
      double headroom = 0.0;
      for (std::size_t i = 0; i < gens.size(); ++i)
        if (!pinned[i]) headroom += gens[i].p_max - gens[i].p_min;
      if (remaining > 1e-9 && headroom <= 0.0)
        throw ValidationError("generation capacity cannot cover total demand");
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if (pinned[i]) continue;
        weight[i] = gens[i].p_max - gens[i].p_min;
      }
      if (headroom <= 0.0) break;
      continue;
    }
    const double s = remaining / free_weight;
    bool changed = false;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (pinned[i]) continue;
      const double d = s * weight[i];
      if (d > gens[i].p_max) {
        gens[i].dispatch = gens[i].p_max;
        pinned[i] = true;
        remaining -= gens[i].p_max;
        changed = true;
      } else if (d < gens[i].p_min) {
        gens[i].dispatch = gens[i].p_min;
        pinned[i] = true;
        remaining -= gens[i].p_min;
        changed = true;
      }
    }
    if (changed) continue;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (!pinned[i]) gens[i].dispatch = s * weight[i];
    break;
  }
}

}  // namespace

Network parse_matpower(std::string_view case_text, const MatpowerImportOptions& options) {
  const auto text = strip_comments(case_text);

  Network net;
  net.base_mva = parse_scalar(text, "baseMVA");
  const auto bus = parse_matrix(text, "bus", 13);
  const auto gen = parse_matrix(text, "gen", 10);
  const auto branch = parse_matrix(text, "branch", 11);
  const auto names = parse_names(text);

  for (std::size_t r = 0; r < bus.size(); ++r) {
    const int id = as_id(bus[r][0], "bus", r + 1, 1);
    std::string name = r < names.size() ? names[r] : "Bus " + std::to_string(id);
    net.buses.push_back(Bus{id, std::move(name)});
    const double pd = bus[r][2];
    if (pd > 0.0) net.loads.push_back(Load{id, pd, pd});
    else if (pd < 0.0) net.generators.push_back(Generator{id, -pd, 0.0, -pd});
  }

  for (std::size_t r = 0; r < gen.size(); ++r) {
    if (gen[r][7] <= 0.0) continue;
    const int bus_id = as_id(gen[r][0], "gen", r + 1, 1);
    const double p_max = std::max(gen[r][8], 0.0);
    const double p_min = std::clamp(gen[r][9], 0.0, p_max);
    net.generators.push_back(Generator{bus_id, p_max, p_min, std::clamp(gen[r][1], p_min, p_max)});
  }

  for (std::size_t r = 0; r < branch.size(); ++r) {
    if (branch[r][10] == 0.0) continue;
    Branch br;
    br.id = static_cast<int>(r + 1);
    br.from_bus = as_id(branch[r][0], "branch", r + 1, 1);
    br.to_bus = as_id(branch[r][1], "branch", r + 1, 2);
    br.reactance = branch[r][3];
    br.flow_limit = branch[r][5];
    br.kind = branch[r][8] != 0.0 ? BranchKind::transformer : BranchKind::line;
    br.maintainable = is_maintainable(br.kind, options.maintainable);
    net.branches.push_back(br);
  }

  // Structural checks must pass before the base-case flow can be computed.
  {
    Network probe = net;
    for (auto& br : probe.branches)
      if (!(br.flow_limit > 0.0)) br.flow_limit = 1.0;
    require_valid(probe);
  }

  rescale_dispatch(net.generators, net.total_demand());

  std::vector<std::size_t> unrated;
  for (std::size_t b = 0; b < net.branches.size(); ++b)
    if (!(net.branches[b].flow_limit > 0.0)) unrated.push_back(b);
  if (!unrated.empty()) {
    const NetworkIndex index(net);
    const Topology topo = all_in_service(net);
    const auto islands = find_islands(net, index, topo);
    std::vector<double> dispatch, served;
    for (const auto& g : net.generators) dispatch.push_back(g.dispatch);
    for (const auto& l : net.loads) served.push_back(l.served);
    balance_islands(net, index, islands, dispatch, served);
    const auto flows = dc_power_flow(net, topo, dispatch, served);
    for (auto b : unrated)
      net.branches[b].flow_limit =
          std::max(options.unlimited_rating_factor * std::abs(flows[b]), options.min_flow_limit);
  }

  require_valid(net);
  return net;
}

Network load_matpower(const std::string& path, const MatpowerImportOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open case file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matpower(ss.str(), options);
}

}  // namespace blackout

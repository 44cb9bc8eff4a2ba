#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace blackout {

struct Bus {
  int id = 0;
  std::string name;

  bool operator==(const Bus&) const = default;
};

enum class BranchKind { line, transformer };

const char* to_string(BranchKind kind);
std::optional<BranchKind> branch_kind_from_string(std::string_view text);

struct Branch {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double reactance = 0.0;   // per unit on the system base
  double flow_limit = 0.0;  // MW
  BranchKind kind = BranchKind::line;
  bool maintainable = false;

  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double p_max = 0.0;
  double p_min = 0.0;
  double dispatch = 0.0;

  bool operator==(const Generator&) const = default;
};

struct Load {
  int bus = 0;
  double demand = 0.0;
  double served = 0.0;

  double shed() const { return demand - served; }
  bool operator==(const Load&) const = default;
};

/// Transmission network together with its pre-cascade operating point.
///
/// All branches are in service; the generator dispatch and served loads
/// form the deterministic initial state of every simulated cascade.
struct Network {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;

  bool operator==(const Network&) const = default;

  double total_demand() const;
  double total_dispatch() const;

  /// Position of a bus id in `buses`, or nullopt.
  std::optional<std::size_t> bus_index(int bus_id) const;
  /// Position of a branch id in `branches`, or nullopt.
  std::optional<std::size_t> branch_index(int branch_id) const;

  /// Ids of maintainable branches in network order.
  std::vector<int> maintainable_ids() const;
  std::size_t transformer_count() const;
  std::size_t line_count() const;
};

/// Dense lookup tables derived from a Network; cheap to rebuild.
struct NetworkIndex {
  explicit NetworkIndex(const Network& net);

  std::unordered_map<int, std::size_t> bus_pos;
  std::unordered_map<int, std::size_t> branch_pos;
  std::vector<std::size_t> branch_from;  // bus positions
  std::vector<std::size_t> branch_to;
  std::vector<std::size_t> gen_bus;
  std::vector<std::size_t> load_bus;
};

struct Violation {
  std::string entity;     // e.g. "branch 12"
  std::string invariant;  // human readable

  bool operator==(const Violation&) const = default;
};

/// Every violated network invariant; empty when the network is valid.
std::vector<Violation> validate(const Network& net);

/// Throws ValidationError listing the violations, if any.
void require_valid(const Network& net);

}  // namespace blackout

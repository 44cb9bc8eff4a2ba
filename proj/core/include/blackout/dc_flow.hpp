#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blackout/grid_model.hpp"

namespace blackout {

/// In-service flag per branch, indexed by branch position in the network.
using Topology = std::vector<bool>;

Topology all_in_service(const Network& net);

/// Connected component of buses over in-service branches.
struct Island {
  std::vector<std::size_t> buses;     // bus positions, ascending
  std::vector<std::size_t> branches;  // in-service branch positions, ascending
  std::size_t reference = 0;          // bus position of the angle reference
};

/// Islands in order of their smallest bus position. Isolated buses form
/// single-bus islands.
std::vector<Island> find_islands(const Network& net, const NetworkIndex& index, const Topology& topology);

/// Factorized B-theta system of one island.
class IslandSolver {
 public:
  /// Throws InternalError when the reduced susceptance matrix is singular.
  IslandSolver(const Network& net, const NetworkIndex& index, const Island& island, std::size_t island_number);

  const Island& island() const { return island_; }

  /// Branch flows (MW, from -> to) for the island's branches given net bus
  /// injections in MW indexed by bus position over the whole network.
  std::vector<double> flows(std::span<const double> injection_by_bus) const;

  /// Power transfer distribution factors: row per island branch, column per
  /// island bus (reference column is zero).
  const Eigen::MatrixXd& ptdf() const;

 private:
  const Network* net_;
  const NetworkIndex* index_;
  Island island_;
  std::vector<std::ptrdiff_t> reduced_pos_;  // island bus -> row in reduced system, -1 for reference
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  mutable Eigen::MatrixXd ptdf_;
  mutable bool have_ptdf_ = false;
};

/// Net injection (generation minus served load) per bus position, MW.
std::vector<double> bus_injections(const Network& net, const NetworkIndex& index,
                                   std::span<const double> dispatch, std::span<const double> served);

/// DC power flow with islanding. Returns one flow per branch position (MW,
/// signed from -> to); out-of-service branches carry zero.
///
/// Each island must be balanced to within 1e-6 MW, otherwise ValidationError.
std::vector<double> dc_power_flow(const Network& net, const Topology& topology,
                                  std::span<const double> dispatch, std::span<const double> served);

/// Tolerance for per-island power balance, MW.
inline constexpr double kBalanceTolerance = 1e-6;

}  // namespace blackout

namespace blackout {

/// Brings every island into balance without an optimizer: surplus
/// generation is scaled down proportionally, a deficit is covered by scaling
/// served load down proportionally. Islands without generation or without
/// load end up fully de-energized. Used for the instantaneous flows that
/// follow a topology change, before any corrective redispatch.
void balance_islands(const Network& net, const NetworkIndex& index, const std::vector<Island>& islands,
                     std::span<double> dispatch, std::span<double> served);

}  // namespace blackout

namespace blackout {

/// Islands of one topology with their factorized B-theta systems; built
/// once per cascade stage and shared by the flow solve and the redispatch.
class TopologyAnalysis {
 public:
  TopologyAnalysis(const Network& net, const NetworkIndex& index, const Topology& topology);

  const Topology& topology() const { return topology_; }
  const std::vector<Island>& islands() const { return islands_; }
  std::size_t island_of_bus(std::size_t bus) const { return island_of_bus_[bus]; }
  /// Solver of island k; null for islands without branches.
  const IslandSolver* solver(std::size_t k) const { return solvers_[k] ? &*solvers_[k] : nullptr; }

  /// Flows per branch position for bus injections that balance per island.
  std::vector<double> flows(std::span<const double> injection_by_bus) const;

 private:
  Topology topology_;
  std::vector<Island> islands_;
  std::vector<std::size_t> island_of_bus_;
  std::vector<std::optional<IslandSolver>> solvers_;
  std::size_t branch_count_;
};

}  // namespace blackout

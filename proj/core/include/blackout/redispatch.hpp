#pragma once

#include <span>
#include <vector>

#include "blackout/dc_flow.hpp"
#include "blackout/grid_model.hpp"

namespace blackout {

/// Objective weights: shed_weight * sum(shed) + redispatch_weight * sum(|delta gen|).
struct RedispatchWeights {
  double shed = 100.0;
  double redispatch = 1.0;

  bool operator==(const RedispatchWeights&) const = default;
};

struct OperatingPoint {
  std::vector<double> dispatch;  // per generator, MW
  std::vector<double> served;    // per load, MW
  double shed = 0.0;             // total unserved demand, MW
  double objective = 0.0;        // weighted LP objective, summed over islands
};

/// Corrective redispatch with load shedding, solved as one LP per island:
/// minimize the weighted shed plus generator movement away from
/// `reference_dispatch`, subject to DC flow, branch limits, generator limits
/// and 0 <= served <= demand. Islands without generation shed everything;
/// islands without load switch their units off.
///
/// Branch limits are added as rows only when the relaxed solution violates
/// them; `all_flow_rows` states every limit up front instead (same optimal
/// value, possibly a different optimal vertex).
OperatingPoint redispatch(const Network& net, const NetworkIndex& index, const TopologyAnalysis& analysis,
                          std::span<const double> reference_dispatch, const RedispatchWeights& weights = {},
                          bool all_flow_rows = false);

/// Convenience overload using the network's own dispatch as reference.
OperatingPoint redispatch(const Network& net, const Topology& topology, const RedispatchWeights& weights = {});

}  // namespace blackout

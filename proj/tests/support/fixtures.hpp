#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blackout/cascade.hpp"
#include "blackout/failure_model.hpp"
#include "blackout/grid_model.hpp"
#include "blackout/risk.hpp"
#include "blackout/tiny_system.hpp"

namespace blackout::fixtures {

std::string data_path(const std::string& file);

/// Bus 1 generates, bus 2 consumes, one line between them.
Network two_bus(double demand, double flow_limit);

/// Ring 1-2-3 with equal reactances; 100 MW from bus 1 to bus 3.
/// Branch 1 is 1-3, branch 2 is 1-2, branch 3 is 2-3.
Network three_bus_ring(double limit_13 = 200.0, double limit_12 = 200.0, double limit_23 = 200.0);

/// Small meshed network with five branches (two transformers); single
/// outages overload neighbours.
Network five_branch();

/// Model with the same parameters for every branch of `net`.
FailureModel uniform_model(const Network& net, const FailureParams& p);

/// One component, fails with probability phi, shedding 100 MW if it does.
TinySystem single_component();

/// Three components A=1, B=2, C=3. B is stressed only once A has failed, C
/// only once B has failed; shed grows along the chain.
TinySystem chain_three();
FailureModel chain_three_model();
/// Maintenance effect and strategy used with the chain fixture.
MaintenanceEffect chain_three_effect();
Strategy chain_three_strategy();

/// Five interacting components with state-dependent loading.
TinySystem five_component();
FailureModel five_component_model();

/// Synthetic matrices mimicking real sample sets: each component "fails" in
/// a small share of samples (ratio near the maintenance factor) and
/// survives elsewhere (ratio slightly above 1). Shed is heavy-tailed.
RiskMatrices synthetic_matrices(std::size_t components, std::size_t n, std::uint64_t seed,
                                double nonzero_share = 0.05);

/// Matrices whose Q/P ratio is the constant r[k] for every sample.
RiskMatrices separable_matrices(const std::vector<double>& r, std::size_t n, std::uint64_t seed);

}  // namespace blackout::fixtures

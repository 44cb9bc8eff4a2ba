#include "blackout/redispatch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blackout/error.hpp"
#include "blackout/linear_program.hpp"

namespace blackout {

namespace {
constexpr double kFlowTolerance = 1e-6;
}  // namespace

OperatingPoint redispatch(const Network& net, const NetworkIndex& index, const TopologyAnalysis& analysis,
                          std::span<const double> reference_dispatch, const RedispatchWeights& weights,
                          bool all_flow_rows) {
  if (reference_dispatch.size() != net.generators.size())
    throw ValidationError("reference dispatch does not match generator count");

  OperatingPoint op;
  op.dispatch.assign(net.generators.size(), 0.0);
  op.served.assign(net.loads.size(), 0.0);

  const auto& islands = analysis.islands();
  std::vector<std::vector<std::size_t>> gens_of(islands.size()), loads_of(islands.size());
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    gens_of[analysis.island_of_bus(index.gen_bus[g])].push_back(g);
  for (std::size_t d = 0; d < net.loads.size(); ++d)
    loads_of[analysis.island_of_bus(index.load_bus[d])].push_back(d);

  for (std::size_t k = 0; k < islands.size(); ++k) {
    const auto& gens = gens_of[k];
    const auto& loads = loads_of[k];
    double demand = 0.0, capacity = 0.0;
    for (auto d : loads) demand += net.loads[d].demand;
    for (auto g : gens) capacity += net.generators[g].p_max;
    // Dead islands: nothing to serve, or nothing to serve it with.
    if (demand <= 0.0 || capacity <= 0.0) continue;

    const auto& island = islands[k];
    std::vector<std::ptrdiff_t> col_of(net.buses.size(), -1);
    for (std::size_t c = 0; c < island.buses.size(); ++c) col_of[island.buses[c]] = static_cast<std::ptrdiff_t>(c);

    const std::size_t ng = gens.size(), nl = loads.size(), nb = island.branches.size();
    std::vector<double> g0(ng);
    double g0_total = 0.0;
    for (std::size_t i = 0; i < ng; ++i) {
      const auto& gen = net.generators[gens[i]];
      g0[i] = std::clamp(reference_dispatch[gens[i]], gen.p_min, gen.p_max);
      g0_total += g0[i];
    }

    // Flow limits enter as rows only once violated: solve, check every
    // branch, add the violated rows, solve again. A relaxed optimum that
    // meets every limit is optimal for the full program.
    const Eigen::MatrixXd* ptdf = nb > 0 ? &analysis.solver(k)->ptdf() : nullptr;
    std::vector<std::size_t> active;
    std::vector<bool> is_active(nb, all_flow_rows);
    if (all_flow_rows)
      for (std::size_t b = 0; b < nb; ++b) active.push_back(b);
    LpSolution sol;
    const std::size_t up0 = 0, down0 = ng, served0 = 2 * ng, flow0 = 2 * ng + nl;
    while (true) {
      LinearProgram lp(flow0 + active.size());
      for (std::size_t i = 0; i < ng; ++i) {
        const auto& gen = net.generators[gens[i]];
        lp.set_bounds(up0 + i, 0.0, gen.p_max - g0[i]);
        lp.set_bounds(down0 + i, 0.0, g0[i] - gen.p_min);
        lp.set_cost(up0 + i, weights.redispatch);
        lp.set_cost(down0 + i, weights.redispatch);
      }
      for (std::size_t i = 0; i < nl; ++i) {
        lp.set_bounds(served0 + i, 0.0, net.loads[loads[i]].demand);
        lp.set_cost(served0 + i, -weights.shed);
      }
      for (std::size_t a = 0; a < active.size(); ++a) {
        const double lim = net.branches[island.branches[active[a]]].flow_limit;
        lp.set_bounds(flow0 + a, -lim, lim);
      }

      std::vector<double> row(lp.num_vars(), 0.0);
      for (std::size_t i = 0; i < ng; ++i) {
        row[up0 + i] = 1.0;
        row[down0 + i] = -1.0;
      }
      for (std::size_t i = 0; i < nl; ++i) row[served0 + i] = -1.0;
      lp.add_row(row, -g0_total);

      for (std::size_t a = 0; a < active.size(); ++a) {
        std::fill(row.begin(), row.end(), 0.0);
        const auto br = static_cast<Eigen::Index>(active[a]);
        double rhs = 0.0;
        for (std::size_t i = 0; i < ng; ++i) {
          const double f = (*ptdf)(br, col_of[index.gen_bus[gens[i]]]);
          row[up0 + i] = f;
          row[down0 + i] = -f;
          rhs -= f * g0[i];
        }
        for (std::size_t i = 0; i < nl; ++i) row[served0 + i] = -(*ptdf)(br, col_of[index.load_bus[loads[i]]]);
        row[flow0 + a] = -1.0;
        lp.add_row(row, rhs);
      }

      sol = solve(lp);
      if (sol.status != LpStatus::optimal)
        throw InternalError("redispatch LP for island " + std::to_string(k) + " ended " + to_string(sol.status));
      if (nb == 0) break;

      // Bus injections of the relaxed solution, then every branch flow.
      Eigen::VectorXd inj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(island.buses.size()));
      for (std::size_t i = 0; i < ng; ++i)
        inj(col_of[index.gen_bus[gens[i]]]) += g0[i] + sol.x[up0 + i] - sol.x[down0 + i];
      for (std::size_t i = 0; i < nl; ++i) inj(col_of[index.load_bus[loads[i]]]) -= sol.x[served0 + i];
      const Eigen::VectorXd flows = (*ptdf) * inj;
      bool added = false;
      for (std::size_t b = 0; b < nb; ++b) {
        if (is_active[b]) continue;
        const double lim = net.branches[island.branches[b]].flow_limit;
        if (std::abs(flows(static_cast<Eigen::Index>(b))) > lim + kFlowTolerance) {
          is_active[b] = true;
          active.push_back(b);
          added = true;
        }
      }
      if (!added) break;
    }

    op.objective += sol.objective + weights.shed * demand;
    for (std::size_t i = 0; i < ng; ++i) {
      const auto& gen = net.generators[gens[i]];
      op.dispatch[gens[i]] = std::clamp(g0[i] + sol.x[up0 + i] - sol.x[down0 + i], gen.p_min, gen.p_max);
    }
    for (std::size_t i = 0; i < nl; ++i)
      op.served[loads[i]] = std::clamp(sol.x[served0 + i], 0.0, net.loads[loads[i]].demand);
  }

  for (std::size_t d = 0; d < net.loads.size(); ++d) op.shed += net.loads[d].demand - op.served[d];
  return op;
}

OperatingPoint redispatch(const Network& net, const Topology& topology, const RedispatchWeights& weights) {
  const NetworkIndex index(net);
  const TopologyAnalysis analysis(net, index, topology);
  std::vector<double> reference;
  for (const auto& g : net.generators) reference.push_back(g.dispatch);
  return redispatch(net, index, analysis, reference, weights);
}

}  // namespace blackout

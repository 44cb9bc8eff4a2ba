#include "blackout/dc_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blackout/error.hpp"

namespace blackout {

Topology all_in_service(const Network& net) { return Topology(net.branches.size(), true); }

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<Island> find_islands(const Network& net, const NetworkIndex& index, const Topology& topology) {
  const std::size_t nb = net.buses.size();
  std::vector<std::size_t> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t b = 0; b < net.branches.size(); ++b) {
    if (!topology[b]) continue;
    const auto ra = find_root(parent, index.branch_from[b]);
    const auto rb = find_root(parent, index.branch_to[b]);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::vector<std::ptrdiff_t> island_of_root(nb, -1);
  std::vector<Island> islands;
  for (std::size_t bus = 0; bus < nb; ++bus) {
    const auto root = find_root(parent, bus);
    if (island_of_root[root] < 0) {
      island_of_root[root] = static_cast<std::ptrdiff_t>(islands.size());
      islands.push_back(Island{{}, {}, bus});
    }
    islands[static_cast<std::size_t>(island_of_root[root])].buses.push_back(bus);
  }
  for (std::size_t b = 0; b < net.branches.size(); ++b) {
    if (!topology[b]) continue;
    const auto root = find_root(parent, index.branch_from[b]);
    islands[static_cast<std::size_t>(island_of_root[root])].branches.push_back(b);
  }
  return islands;
}

IslandSolver::IslandSolver(const Network& net, const NetworkIndex& index, const Island& island,
                           std::size_t island_number)
    : net_(&net), index_(&index), island_(island), reduced_pos_(net.buses.size(), -1) {
  std::ptrdiff_t next = 0;
  for (auto bus : island_.buses)
    if (bus != island_.reference) reduced_pos_[bus] = next++;

  const auto n = static_cast<Eigen::Index>(next);
  if (n == 0) return;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (auto br : island_.branches) {
    const double y = 1.0 / net.branches[br].reactance;
    const auto f = reduced_pos_[index.branch_from[br]];
    const auto t = reduced_pos_[index.branch_to[br]];
    if (f >= 0) b(f, f) += y;
    if (t >= 0) b(t, t) += y;
    if (f >= 0 && t >= 0) {
      b(f, t) -= y;
      b(t, f) -= y;
    }
  }
  lu_.compute(b);
  if (!(lu_.rcond() > 1e-12))
    throw InternalError("singular susceptance matrix in island " + std::to_string(island_number) +
                        " (reference bus " + std::to_string(net.buses[island_.reference].id) + ")");
}

std::vector<double> IslandSolver::flows(std::span<const double> injection_by_bus) const {
  std::vector<double> out(island_.branches.size(), 0.0);
  const auto n = lu_.matrixLU().rows();
  if (n == 0 || island_.branches.empty()) return out;
  Eigen::VectorXd p(n);
  for (auto bus : island_.buses)
    if (reduced_pos_[bus] >= 0) p(reduced_pos_[bus]) = injection_by_bus[bus];
  const Eigen::VectorXd theta = lu_.solve(p);
  auto angle = [&](std::size_t bus) {
    const auto r = reduced_pos_[bus];
    return r >= 0 ? theta(r) : 0.0;
  };
  for (std::size_t k = 0; k < island_.branches.size(); ++k) {
    const auto br = island_.branches[k];
    out[k] = (angle(index_->branch_from[br]) - angle(index_->branch_to[br])) / net_->branches[br].reactance;
  }
  return out;
}

const Eigen::MatrixXd& IslandSolver::ptdf() const {
  if (have_ptdf_) return ptdf_;
  const auto nbr = static_cast<Eigen::Index>(island_.branches.size());
  const auto nbus = static_cast<Eigen::Index>(island_.buses.size());
  ptdf_ = Eigen::MatrixXd::Zero(nbr, nbus);
  const auto n = lu_.matrixLU().rows();
  if (n > 0 && nbr > 0) {
    const Eigen::MatrixXd x = lu_.inverse();
    std::vector<std::ptrdiff_t> col_of(net_->buses.size(), -1);
    for (std::size_t c = 0; c < island_.buses.size(); ++c) col_of[island_.buses[c]] = static_cast<std::ptrdiff_t>(c);
    for (Eigen::Index k = 0; k < nbr; ++k) {
      const auto br = island_.branches[static_cast<std::size_t>(k)];
      const auto f = reduced_pos_[index_->branch_from[br]];
      const auto t = reduced_pos_[index_->branch_to[br]];
      const double inv_x = 1.0 / net_->branches[br].reactance;
      for (auto bus : island_.buses) {
        const auto r = reduced_pos_[bus];
        if (r < 0) continue;
        const double xf = f >= 0 ? x(f, r) : 0.0;
        const double xt = t >= 0 ? x(t, r) : 0.0;
        ptdf_(k, col_of[bus]) = (xf - xt) * inv_x;
      }
    }
  }
  have_ptdf_ = true;
  return ptdf_;
}

std::vector<double> bus_injections(const Network& net, const NetworkIndex& index,
                                   std::span<const double> dispatch, std::span<const double> served) {
  if (dispatch.size() != net.generators.size() || served.size() != net.loads.size())
    throw ValidationError("dispatch/served vectors do not match the network");
  std::vector<double> inj(net.buses.size(), 0.0);
  for (std::size_t g = 0; g < dispatch.size(); ++g) inj[index.gen_bus[g]] += dispatch[g];
  for (std::size_t d = 0; d < served.size(); ++d) inj[index.load_bus[d]] -= served[d];
  return inj;
}

std::vector<double> dc_power_flow(const Network& net, const Topology& topology,
                                  std::span<const double> dispatch, std::span<const double> served) {
  if (topology.size() != net.branches.size()) throw ValidationError("topology size does not match branch count");
  const NetworkIndex index(net);
  const auto inj = bus_injections(net, index, dispatch, served);
  const auto islands = find_islands(net, index, topology);

  std::vector<double> flows(net.branches.size(), 0.0);
  for (std::size_t k = 0; k < islands.size(); ++k) {
    const auto& island = islands[k];
    double balance = 0.0;
    for (auto bus : island.buses) balance += inj[bus];
    if (std::abs(balance) > kBalanceTolerance)
      throw ValidationError("island " + std::to_string(k) + " (reference bus " +
                            std::to_string(net.buses[island.reference].id) + ") is unbalanced by " +
                            std::to_string(balance) + " MW");
    if (island.branches.empty()) continue;
    const IslandSolver solver(net, index, island, k);
    const auto f = solver.flows(inj);
    for (std::size_t i = 0; i < island.branches.size(); ++i) flows[island.branches[i]] = f[i];
  }
  return flows;
}

}  // namespace blackout

namespace blackout {

void balance_islands(const Network& net, const NetworkIndex& index, const std::vector<Island>& islands,
                     std::span<double> dispatch, std::span<double> served) {
  std::vector<std::size_t> island_of(net.buses.size());
  for (std::size_t k = 0; k < islands.size(); ++k)
    for (auto bus : islands[k].buses) island_of[bus] = k;

  std::vector<double> gen(islands.size(), 0.0), load(islands.size(), 0.0);
  for (std::size_t g = 0; g < dispatch.size(); ++g) gen[island_of[index.gen_bus[g]]] += dispatch[g];
  for (std::size_t d = 0; d < served.size(); ++d) load[island_of[index.load_bus[d]]] += served[d];

  std::vector<double> gen_scale(islands.size(), 1.0), load_scale(islands.size(), 1.0);
  for (std::size_t k = 0; k < islands.size(); ++k) {
    if (gen[k] <= 0.0 || load[k] <= 0.0) {
      gen_scale[k] = 0.0;
      load_scale[k] = 0.0;
    } else if (gen[k] > load[k]) {
      gen_scale[k] = load[k] / gen[k];
    } else if (load[k] > gen[k]) {
      load_scale[k] = gen[k] / load[k];
    }
  }
  for (std::size_t g = 0; g < dispatch.size(); ++g) dispatch[g] *= gen_scale[island_of[index.gen_bus[g]]];
  for (std::size_t d = 0; d < served.size(); ++d) served[d] *= load_scale[island_of[index.load_bus[d]]];
}

}  // namespace blackout

namespace blackout {

TopologyAnalysis::TopologyAnalysis(const Network& net, const NetworkIndex& index, const Topology& topology)
    : topology_(topology),
      islands_(find_islands(net, index, topology)),
      island_of_bus_(net.buses.size(), 0),
      branch_count_(net.branches.size()) {
  solvers_.reserve(islands_.size());
  for (std::size_t k = 0; k < islands_.size(); ++k) {
    for (auto bus : islands_[k].buses) island_of_bus_[bus] = k;
    if (islands_[k].branches.empty()) solvers_.emplace_back(std::nullopt);
    else solvers_.emplace_back(std::in_place, net, index, islands_[k], k);
  }
}

std::vector<double> TopologyAnalysis::flows(std::span<const double> injection_by_bus) const {
  std::vector<double> out(branch_count_, 0.0);
  for (std::size_t k = 0; k < islands_.size(); ++k) {
    if (!solvers_[k]) continue;
    const auto f = solvers_[k]->flows(injection_by_bus);
    for (std::size_t i = 0; i < islands_[k].branches.size(); ++i) out[islands_[k].branches[i]] = f[i];
  }
  return out;
}

}  // namespace blackout

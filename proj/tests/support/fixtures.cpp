#include "fixtures.hpp"

#include <cmath>
#include <map>
#include <random>

namespace blackout::fixtures {

std::string data_path(const std::string& file) { return std::string(BLACKOUT_TEST_DATA_DIR) + "/" + file; }

Network two_bus(double demand, double flow_limit) {
  Network net;
  net.buses = {{1, "gen"}, {2, "load"}};
  net.branches = {{1, 1, 2, 0.1, flow_limit, BranchKind::line}};
  net.generators = {{1, 2 * demand, 0.0, demand}};
  net.loads = {{2, demand, demand}};
  return net;
}

Network three_bus_ring(double limit_13, double limit_12, double limit_23) {
  Network net;
  net.buses = {{1, ""}, {2, ""}, {3, ""}};
  net.branches = {{1, 1, 3, 0.1, limit_13, BranchKind::line},
                  {2, 1, 2, 0.1, limit_12, BranchKind::line},
                  {3, 2, 3, 0.1, limit_23, BranchKind::line}};
  net.generators = {{1, 200.0, 0.0, 100.0}};
  net.loads = {{3, 100.0, 100.0}};
  return net;
}

Network five_branch() {
  // 1 and 2 generate, 3 and 4 consume.
  Network net;
  net.buses = {{1, ""}, {2, ""}, {3, ""}, {4, ""}};
  net.branches = {{1, 1, 2, 0.10, 80.0, BranchKind::line},
                  {2, 1, 3, 0.20, 90.0, BranchKind::line},
                  {3, 2, 3, 0.15, 90.0, BranchKind::transformer},
                  {4, 2, 4, 0.10, 100.0, BranchKind::line},
                  {5, 3, 4, 0.25, 60.0, BranchKind::transformer}};
  net.generators = {{1, 150.0, 0.0, 110.0}, {2, 150.0, 0.0, 90.0}};
  net.loads = {{3, 120.0, 120.0}, {4, 80.0, 80.0}};
  return net;
}

FailureModel uniform_model(const Network& net, const FailureParams& p) {
  std::map<int, FailureParams> m;
  for (const auto& br : net.branches) m[br.id] = p;
  return FailureModel(m);
}

TinySystem single_component() {
  TinySystem sys;
  sys.ids = {1};
  sys.loading = {{0.0}, {0.0}};
  sys.shed = {0.0, 100.0};
  sys.stage_cap = 1;
  return sys;
}

TinySystem chain_three() {
  // Positions: 0 = A (id 1), 1 = B (id 2), 2 = C (id 3); mask bit i = position i failed.
  TinySystem sys;
  sys.ids = {1, 2, 3};
  sys.loading.assign(8, std::vector<double>(3, 0.0));
  sys.shed.assign(8, 0.0);
  for (unsigned mask = 0; mask < 8; ++mask) {
    const bool a = mask & 1, b = mask & 2, c = mask & 4;
    sys.loading[mask][0] = 0.5;
    sys.loading[mask][1] = a ? 2.0 : 0.0;
    sys.loading[mask][2] = b ? 1.5 : 0.3;
    sys.shed[mask] = (a ? 20.0 : 0.0) + (b ? 60.0 : 0.0) + (c ? 120.0 : 0.0) + (a && b && c ? 50.0 : 0.0);
  }
  sys.stage_cap = 10;
  return sys;
}

FailureModel chain_three_model() {
  return FailureModel({{1, {0.2, 0.2, 1.0, 2.0}},
                       {2, {0.0, 0.6, 1.0, 1.4}},
                       {3, {0.05, 0.5, 1.0, 1.4}}});
}

MaintenanceEffect chain_three_effect() { return MaintenanceEffect::scale(0.3); }

Strategy chain_three_strategy() { return Strategy{{1, 3}}; }

TinySystem five_component() {
  TinySystem sys;
  sys.ids = {2, 3, 5, 7, 11};
  const std::size_t k = sys.ids.size();
  sys.loading.assign(std::size_t{1} << k, std::vector<double>(k, 0.0));
  sys.shed.assign(std::size_t{1} << k, 0.0);
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const int failed = __builtin_popcount(mask);
    for (std::size_t i = 0; i < k; ++i) {
      // Loading rises with the number of failed neighbours on a ring.
      const bool left = mask & (1u << ((i + k - 1) % k)), right = mask & (1u << ((i + 1) % k));
      sys.loading[mask][i] = 0.6 + 0.35 * (left + right) + 0.05 * failed + 0.02 * static_cast<double>(i);
    }
    sys.shed[mask] = failed == 0 ? 0.0 : 15.0 * failed * failed + 3.0 * (mask & 0x5 ? 1 : 0);
  }
  sys.stage_cap = 4;
  return sys;
}

FailureModel five_component_model() {
  return FailureModel({{2, {0.05, 0.7, 0.9, 1.5}},
                       {3, {0.08, 0.6, 0.9, 1.4}},
                       {5, {0.03, 0.9, 1.0, 1.6}},
                       {7, {0.10, 0.5, 0.8, 1.3}},
                       {11, {0.04, 0.8, 1.0, 1.5}}});
}

RiskMatrices synthetic_matrices(std::size_t components, std::size_t n, std::uint64_t seed, double nonzero_share) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> ids;
  for (std::size_t k = 0; k < components; ++k) ids.push_back(static_cast<int>(3 * k + 1));
  std::vector<double> shed(n, 0.0), p(components * n), q(components * n);
  std::vector<double> involvement(components);
  for (auto& v : involvement) v = 0.02 + 0.3 * u(rng) * u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const bool blackout = u(rng) < nonzero_share;
    if (blackout) shed[i] = 10.0 / std::pow(1.0 - u(rng) * 0.999, 0.7);
    for (std::size_t k = 0; k < components; ++k) {
      const double base = 1e-3 * (1.0 + 5.0 * u(rng));
      const bool failed = u(rng) < (blackout ? involvement[k] : 0.002);
      const double pk = failed ? base : 1.0 - base;
      const double factor = 0.05 + 0.2 * u(rng);
      const double qk = failed ? base * factor : 1.0 - base * factor;
      p[k * n + i] = pk;
      q[k * n + i] = qk;
    }
  }
  return make_matrices(ids, shed, p, q, 0.0);
}

RiskMatrices separable_matrices(const std::vector<double>& r, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> ids;
  for (std::size_t k = 0; k < r.size(); ++k) ids.push_back(static_cast<int>(k + 1));
  std::vector<double> shed(n), p(r.size() * n), q(r.size() * n);
  for (std::size_t i = 0; i < n; ++i) shed[i] = u(rng) < 0.3 ? 100.0 * u(rng) : 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double pk = 0.3 + 0.4 * u(rng);  // pk * r stays below 1 for r < 1.4
      p[k * n + i] = pk;
      q[k * n + i] = pk * r[k];
    }
  return make_matrices(ids, shed, p, q, 0.0);
}

}  // namespace blackout::fixtures

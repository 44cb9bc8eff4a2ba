#pragma once

#include <cstdint>
#include <vector>

#include "blackout/cascade.hpp"
#include "blackout/failure_model.hpp"

namespace blackout {

/// A cascade model small enough to enumerate. The state is the set of
/// failed components, a bitmask over `ids` positions; loading ratios and
/// shed are tabulated per state, so no power flow is involved.
struct TinySystem {
  std::vector<int> ids;                       // at most 6 components
  std::vector<std::vector<double>> loading;   // [mask][position]
  std::vector<double> shed;                   // [mask], MW
  int stage_cap = 100;

  std::size_t size() const { return ids.size(); }
  double total_demand() const;
  /// Throws ValidationError on inconsistent tables.
  void check() const;
};

/// Same stage loop as CascadeSimulator on the tabulated states. Traces are
/// recorded for every component.
CascadeSample simulate_tiny(const TinySystem& sys, const FailureModel& model, RandomStream& rng);

/// Number of distinct cascade paths of the system.
std::uint64_t count_paths_tiny(const TinySystem& sys);

/// Exact risk: sum over all cascade paths z of g(z) * h(z) * [h(z) >= y0].
/// Throws RefusalError when there are more than 10^7 paths.
double exact_risk_tiny(const TinySystem& sys, const FailureModel& model, double y0);

/// Probability of every path, keyed by its (stage, id) event list; for
/// frequency checks against simulate_tiny.
std::vector<std::pair<std::vector<CascadeEvent>, double>> path_probabilities_tiny(const TinySystem& sys,
                                                                                   const FailureModel& model);

}  // namespace blackout

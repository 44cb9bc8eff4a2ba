#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackout/dc_flow.hpp"
#include "blackout/failure_model.hpp"
#include "blackout/grid_model.hpp"
#include "blackout/redispatch.hpp"
#include "blackout/rng.hpp"

namespace blackout {

struct CascadeEvent {
  int stage = 0;
  int branch = 0;

  bool operator==(const CascadeEvent&) const = default;
};

/// Loading ratios of one component at every stage in which its failure was
/// drawn: from stage 0 while in service, ending with the failure stage if
/// it failed, or with the terminal (all-survive) stage if it survived.
struct LoadingTrace {
  int branch = 0;
  std::vector<double> loading;

  bool operator==(const LoadingTrace&) const = default;
};

/// One simulated cascade.
struct CascadeSample {
  std::uint64_t substream = 0;  // RNG substream the sample was drawn from
  int stages = 0;               // number of stages with at least one failure
  double shed = 0.0;            // final unserved demand, MW
  bool truncated = false;       // stopped by the stage cap
  std::vector<CascadeEvent> events;
  std::map<int, int> fail_stage;      // branch id -> stage it failed at
  std::vector<LoadingTrace> traces;   // ascending branch id

  const LoadingTrace* trace(int branch) const;
  std::optional<int> failure_stage(int branch) const;

  bool operator==(const CascadeSample&) const = default;
};

nlohmann::json sample_to_json(const CascadeSample& s);
CascadeSample sample_from_json(const nlohmann::json& doc, const std::string& path = "$");

/// Invariant violations of a sample (empty when consistent).
std::vector<std::string> check_sample(const CascadeSample& s, double total_demand, int stage_cap);

struct CascadeOptions {
  int stage_cap = 100;
  bool full_traces = false;  // traces for every branch, not only maintainable ones
  RedispatchWeights weights{};

  nlohmann::json to_json() const;
  bool operator==(const CascadeOptions&) const = default;
};

/// Simplified OPA fast-dynamics cascade on a fixed network and baseline
/// failure model. The intact-network stage is computed once at construction;
/// simulate() is const and safe to call concurrently.
///
/// Stage j of a cascade:
///  1. flows on the current topology with the dispatch carried over from the
///     previous stage (islands balanced proportionally) give loading ratios;
///  2. corrective redispatch on the current topology gives the operating
///     point and shed;
///  3. every in-service branch fails independently with probability
///     phi(loading); with no failure the cascade ends and the shed of step 2
///     is final, otherwise failed branches are removed and the redispatched
///     generation is carried into stage j+1.
class CascadeSimulator {
 public:
  CascadeSimulator(Network net, FailureModel model, CascadeOptions options = {});

  CascadeSample simulate(RandomStream& rng) const;

  const Network& network() const { return net_; }
  const FailureModel& model() const { return model_; }
  const CascadeOptions& options() const { return options_; }
  /// Branch ids whose loading traces are recorded, ascending.
  const std::vector<int>& traced_ids() const { return traced_ids_; }
  /// Loading ratios of the intact network, per branch position.
  const std::vector<double>& base_loading() const { return base_loading_; }
  const OperatingPoint& base_operating_point() const { return base_op_; }

  std::string network_hash() const;
  std::string model_hash() const;

  /// Loading ratio per branch position for flows on a topology.
  std::vector<double> loading_ratios(std::span<const double> flows, const Topology& topology) const;

 private:
  struct StageState {
    std::vector<double> loading;
    OperatingPoint op;
  };
  StageState evaluate(const Topology& topology, const OperatingPoint& carried) const;
  /// Stage reached from the intact network when only branch position b trips.
  const StageState& single_outage(std::size_t b) const;

  struct OutageCache {
    std::vector<std::once_flag> once;
    std::vector<StageState> states;
    explicit OutageCache(std::size_t n) : once(n), states(n) {}
  };

  Network net_;
  NetworkIndex index_;
  FailureModel model_;
  CascadeOptions options_;
  std::vector<FailureParams> params_;  // per branch position
  std::vector<int> traced_ids_;
  std::vector<std::ptrdiff_t> trace_slot_;  // per branch position, -1 if untraced
  std::vector<double> base_loading_;
  OperatingPoint base_op_;
  std::shared_ptr<OutageCache> outage_cache_;
};

CascadeSample simulate_cascade(const Network& net, const FailureModel& baseline, RandomStream& rng,
                               const CascadeOptions& options = {});

/// Component factor of a cascade's probability. `phi` holds the failure
/// probability at each recorded trace point of component k: the product of
/// survival terms, times the failure term at the last point if k failed.
double gamma_factor(std::span<const double> phi, const CascadeSample& sample, int k);

/// gamma_factor with phi evaluated from a failure function on k's trace.
double gamma_factor(const FailureParams& params, const CascadeSample& sample, int k);

/// Probability of the cascade path under `models`, accumulated stage by
/// stage over failing and surviving components. Needs full traces.
double sample_probability(const CascadeSample& sample, const FailureModel& models);

/// Same probability as the product of gamma_factor over all components.
double sample_probability_by_components(const CascadeSample& sample, const FailureModel& models);

}  // namespace blackout

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackout/cascade.hpp"
#include "blackout/failure_model.hpp"
#include "blackout/sample_set.hpp"
#include "blackout/tiny_system.hpp"

namespace blackout {

/// Set of maintained components.
struct Strategy {
  std::vector<int> maintained;

  bool empty() const { return maintained.empty(); }
  std::size_t size() const { return maintained.size(); }
  /// Ids ascending.
  Strategy sorted() const;

  bool operator==(const Strategy&) const = default;
};

/// Per-component Gamma factors, row-major by component: entry (k, i) at
/// k * n + i. Immutable once built and shared between threshold views.
struct GammaFactors {
  std::vector<double> p;      // Gamma under the baseline function
  std::vector<double> q;      // Gamma under the maintained function
  std::vector<double> ratio;  // q / p
};

/// Consequence vector and per-component Gamma factors of a sample set.
struct RiskMatrices {
  std::vector<int> component_ids;  // ascending
  std::size_t n = 0;
  std::shared_ptr<const GammaFactors> factors;
  std::vector<double> shed;   // h per sample, MW
  double y0 = 0.0;
  std::vector<double> c;      // shed where shed >= y0, else 0
  std::vector<std::uint32_t> nonzero;  // samples with c > 0, ascending

  std::size_t components() const { return component_ids.size(); }
  /// Row of a component; throws ValidationError for an unknown id.
  std::size_t position(int id) const;
  /// Rows of a strategy, ascending; throws ValidationError for unknown or
  /// repeated ids.
  std::vector<std::size_t> positions(const Strategy& s) const;

  /// Rebuilds c for another threshold. P and Q do not depend on it.
  void set_y0(double threshold);
  /// Copy at another threshold, sharing the factors.
  RiskMatrices at_threshold(double threshold) const;

  double p_at(std::size_t k, std::size_t i) const { return factors->p[k * n + i]; }
  double q_at(std::size_t k, std::size_t i) const { return factors->q[k * n + i]; }
  double ratio_at(std::size_t k, std::size_t i) const { return factors->ratio[k * n + i]; }
};

/// Assembles matrices from raw factor arrays (row-major, K x N).
RiskMatrices make_matrices(std::vector<int> component_ids, std::vector<double> shed, std::vector<double> p,
                           std::vector<double> q, double y0);

/// Builds C, P and Q over `component_ids`. Every sample must carry a trace
/// for every listed component. Throws Error naming (component, sample) when a
/// baseline factor is zero, since such a sample cannot have been drawn.
RiskMatrices build_matrices(std::span<const CascadeSample> samples, const FailureModel& baseline,
                            const MaintenanceEffect& effect, double y0, std::vector<int> component_ids);
RiskMatrices build_matrices(const SampleSet& samples, const FailureModel& baseline, const MaintenanceEffect& effect,
                            double y0, std::vector<int> component_ids);

/// Plain Monte Carlo estimate (1/N) sum c_i.
double estimate_risk(const RiskMatrices& m);

/// w_i = product over maintained k of Q_ki / P_ki.
std::vector<double> strategy_weights(const RiskMatrices& m, const Strategy& s);

/// L_i = w_i * c_i for every sample.
std::vector<double> strategy_terms(const RiskMatrices& m, const Strategy& s);

/// Reweighted estimate (1/N) sum w_i c_i. Bit-identical to estimate_risk
/// for the empty strategy.
double estimate_risk_strategy(const RiskMatrices& m, const Strategy& s);
double estimate_risk_positions(const RiskMatrices& m, std::span<const std::size_t> rows);

/// Binary blob: "BKRM", u32 version, u64 K, u64 N, f64 y0, i64 ids[K],
/// f64 shed[N], f64 p[K*N], f64 q[K*N]; all little-endian.
void write_matrices_blob(const RiskMatrices& m, std::ostream& out);
RiskMatrices read_matrices_blob(std::istream& in);
void save_matrices(const RiskMatrices& m, const std::string& path);
RiskMatrices load_matrices(const std::string& path);

/// One row per sample: sample, shed, c, then the P_<id> columns and the
/// Q_<id> columns.
void write_matrices_csv(const RiskMatrices& m, std::ostream& out);

nlohmann::json strategy_to_json(const Strategy& s);

}  // namespace blackout

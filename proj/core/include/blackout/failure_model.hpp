#pragma once

#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "blackout/grid_model.hpp"

namespace blackout {

/// Piecewise-linear failure probability in the loading ratio |flow|/limit:
/// flat at p_base up to the knee, linear up to saturation, flat at p_peak.
struct FailureParams {
  double p_base = 0.0;
  double p_peak = 0.0;
  double ell_knee = 1.0;
  double ell_sat = 1.4;

  double probability(double loading_ratio) const {
    if (loading_ratio <= ell_knee) return p_base;
    if (loading_ratio >= ell_sat) return p_peak;
    return p_base + (p_peak - p_base) * (loading_ratio - ell_knee) / (ell_sat - ell_knee);
  }

  bool operator==(const FailureParams&) const = default;
};

/// Throws ValidationError unless 0 <= p_base <= p_peak <= 1 and 0 <= knee < sat.
void check(const FailureParams& params, const std::string& who);

// Uncalibrated defaults.
inline constexpr FailureParams kDefaultLineParams{1e-4, 0.999, 1.0, 1.4};
inline constexpr FailureParams kDefaultTransformerParams{5e-4, 0.999, 1.0, 1.3};

enum class MaintenanceMode { scale, replace };

/// How maintenance changes a component's failure probability function.
struct MaintenanceEffect {
  MaintenanceMode mode = MaintenanceMode::scale;
  double scale_factor = 0.1;    // mode == scale: multiplies p_base and p_peak
  FailureParams replacement{};  // mode == replace

  static MaintenanceEffect scale(double factor) { return {MaintenanceMode::scale, factor, {}}; }
  static MaintenanceEffect replace(const FailureParams& p) { return {MaintenanceMode::replace, 1.0, p}; }

  FailureParams apply(const FailureParams& baseline) const;
  void check() const;

  nlohmann::json to_json() const;
  static MaintenanceEffect from_json(const nlohmann::json& doc, const std::string& path = "$");

  bool operator==(const MaintenanceEffect&) const = default;
};

/// Failure probability function for every component, keyed by component id.
class FailureModel {
 public:
  FailureModel() = default;
  explicit FailureModel(std::map<int, FailureParams> per_component);

  /// Defaults by branch kind, then per-branch overrides (which must name
  /// existing branches).
  static FailureModel for_network(const Network& net, const FailureParams& line = kDefaultLineParams,
                                  const FailureParams& transformer = kDefaultTransformerParams,
                                  const std::map<int, FailureParams>& overrides = {});

  bool contains(int id) const { return params_.contains(id); }
  /// Throws Error for an unknown id.
  const FailureParams& params(int id) const;
  double probability(int id, double loading_ratio) const;

  /// Copy in which the listed components carry their post-maintenance function.
  FailureModel with_maintenance(const MaintenanceEffect& effect, std::span<const int> ids) const;

  const std::map<int, FailureParams>& components() const { return params_; }

  nlohmann::json to_json() const;
  std::string digest() const;

  bool operator==(const FailureModel&) const = default;

 private:
  std::map<int, FailureParams> params_;
};

/// Probability that `branch` fails at the given loading ratio (>= 0).
double failure_probability(const FailureModel& model, int branch, double loading_ratio);

nlohmann::json params_to_json(const FailureParams& p);
FailureParams params_from_json(const nlohmann::json& doc, const std::string& path);

}  // namespace blackout

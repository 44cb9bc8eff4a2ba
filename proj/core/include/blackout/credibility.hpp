#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackout/risk.hpp"

namespace blackout {

struct VarianceEstimate {
  double variance = 0.0;             // of the risk estimator, D = d / N
  double per_sample_variance = 0.0;  // sample variance of the terms, d
};

/// Sample variance of the terms L_i around `risk` and the estimator
/// variance it implies. Needs at least two terms.
VarianceEstimate estimate_variance(std::span<const double> terms, double risk);
VarianceEstimate estimate_variance(const RiskMatrices& m, const Strategy& s, double risk);

/// Inverse standard normal CDF (Wichura AS241, about 1e-16 relative).
double normal_quantile(double prob);

/// z_{(1+beta)/2}.
double two_sided_z(double beta);

/// Relative half-width z * sqrt(variance) / risk of the beta-level interval.
double relative_error_bound(double risk, double variance, double beta);

/// Smallest N with relative half-width at most eps_bar:
/// ceil(d / risk^2 * (z / eps_bar)^2), at least 1.
std::uint64_t required_samples(double per_sample_variance, double risk, double beta, double eps_bar);

/// Credibility of one strategy's estimate. For zero risk the relative bound
/// and the sample-size rule are undefined; epsilon_hat and required_n are
/// left empty and the interval is [0, absolute_half_width].
struct CredibilityReport {
  double risk = 0.0;
  double variance = 0.0;
  double per_sample_variance = 0.0;
  std::optional<double> epsilon_hat;
  double beta = 0.95;
  double eps_bar = 0.1;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double absolute_half_width = 0.0;
  std::optional<std::uint64_t> required_n;
  std::size_t n = 0;
  std::size_t nonzero_terms = 0;
  double max_term = 0.0;
  std::vector<std::string> warnings;
};

CredibilityReport credibility_from_terms(std::span<const double> terms, double risk, double beta, double eps_bar);
CredibilityReport credibility_report(const RiskMatrices& m, const Strategy& s, double beta, double eps_bar);

nlohmann::json to_json(const CredibilityReport& r);

}  // namespace blackout

#include "blackout/credibility.hpp"

#include <cmath>

#include "blackout/error.hpp"

namespace blackout {

namespace {

constexpr std::size_t kMinNonzeroTerms = 30;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
}

}  // namespace

VarianceEstimate estimate_variance(std::span<const double> terms, double risk) {
  if (terms.size() < 2) throw ValidationError("variance needs at least two samples");
  double sum = 0.0, comp = 0.0;
  for (double l : terms) {
    const double d = l - risk;
    const double y = d * d - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  VarianceEstimate v;
  v.per_sample_variance = sum / static_cast<double>(terms.size() - 1);
  v.variance = v.per_sample_variance / static_cast<double>(terms.size());
  return v;
}

VarianceEstimate estimate_variance(const RiskMatrices& m, const Strategy& s, double risk) {
  return estimate_variance(strategy_terms(m, s), risk);
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw ValidationError("quantile probability must lie in (0, 1)");
  const double q = prob - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? prob : 1.0 - prob;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
             1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
             0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
             0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
             7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

double two_sided_z(double beta) {
  check_beta(beta);
  return normal_quantile(0.5 + 0.5 * beta);
}

double relative_error_bound(double risk, double variance, double beta) {
  if (!(risk > 0.0)) throw ValidationError("relative error bound needs risk > 0");
  if (!(variance >= 0.0)) throw ValidationError("variance must be >= 0");
  return two_sided_z(beta) * std::sqrt(variance) / risk;
}

std::uint64_t required_samples(double per_sample_variance, double risk, double beta, double eps_bar) {
  if (!(risk > 0.0)) throw ValidationError("required sample size needs risk > 0");
  if (!(eps_bar > 0.0)) throw ValidationError("target relative error must be > 0");
  if (!(per_sample_variance >= 0.0)) throw ValidationError("variance must be >= 0");
  const double z = two_sided_z(beta);
  const double n = std::ceil(per_sample_variance / (risk * risk) * (z / eps_bar) * (z / eps_bar));
  if (n >= 1.8e19) throw RefusalError("required sample size overflows", UINT64_MAX);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

CredibilityReport credibility_from_terms(std::span<const double> terms, double risk, double beta, double eps_bar) {
  check_beta(beta);
  if (!(eps_bar > 0.0)) throw ValidationError("target relative error must be > 0");
  CredibilityReport r;
  r.risk = risk;
  r.beta = beta;
  r.eps_bar = eps_bar;
  r.n = terms.size();
  const auto v = estimate_variance(terms, risk);
  r.variance = v.variance;
  r.per_sample_variance = v.per_sample_variance;
  for (double l : terms) {
    if (l != 0.0) ++r.nonzero_terms;
    r.max_term = std::max(r.max_term, std::abs(l));
  }
  r.absolute_half_width = two_sided_z(beta) * std::sqrt(r.variance);
  if (risk > 0.0) {
    r.epsilon_hat = relative_error_bound(risk, r.variance, beta);
    r.interval_lo = (1.0 - *r.epsilon_hat) * risk;
    r.interval_hi = (1.0 + *r.epsilon_hat) * risk;
    r.required_n = required_samples(r.per_sample_variance, risk, beta, eps_bar);
  } else {
    r.interval_lo = 0.0;
    r.interval_hi = r.absolute_half_width;
    r.warnings.push_back("zero risk estimate: relative bound and required sample size are undefined");
  }
  if (r.nonzero_terms < kMinNonzeroTerms)
    r.warnings.push_back("only " + std::to_string(r.nonzero_terms) +
                         " samples contribute to the estimate; the normal approximation may not hold");
  return r;
}

CredibilityReport credibility_report(const RiskMatrices& m, const Strategy& s, double beta, double eps_bar) {
  const double risk = estimate_risk_strategy(m, s);
  return credibility_from_terms(strategy_terms(m, s), risk, beta, eps_bar);
}

nlohmann::json to_json(const CredibilityReport& r) {
  nlohmann::json doc = {{"risk", r.risk},
                        {"variance", r.variance},
                        {"per_sample_variance", r.per_sample_variance},
                        {"epsilon_hat", nullptr},
                        {"beta", r.beta},
                        {"eps_bar", r.eps_bar},
                        {"interval", {r.interval_lo, r.interval_hi}},
                        {"absolute_half_width", r.absolute_half_width},
                        {"required_n", nullptr},
                        {"n", r.n},
                        {"nonzero_terms", r.nonzero_terms},
                        {"max_term", r.max_term},
                        {"warnings", r.warnings}};
  if (r.epsilon_hat) doc["epsilon_hat"] = *r.epsilon_hat;
  if (r.required_n) doc["required_n"] = *r.required_n;
  return doc;
}

}  // namespace blackout

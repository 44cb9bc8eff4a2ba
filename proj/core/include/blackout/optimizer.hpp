#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackout/credibility.hpp"
#include "blackout/risk.hpp"

namespace blackout {

enum class Algorithm { enumeration, one, two };

const char* to_string(Algorithm a);
/// Accepts "enum", "one", "two".
Algorithm algorithm_from_string(const std::string& text);

struct OptimizerConfig {
  int m_max = 4;           // maintenance budget
  int m_k = 8;             // shortlist size of algorithm one
  double beta = 0.95;
  double eps_bar = 0.1;
  double y0 = 0.0;
  std::size_t n0 = 5000;   // initial sample count of the adaptive loop
  int max_rounds = 10;

  /// Throws ValidationError unless 1 <= m_max <= m_k <= components and n0 >= 2.
  void check(std::size_t components, Algorithm alg) const;
};

struct RoundRecord {
  std::size_t n = 0;
  Strategy strategy;
  double risk = 0.0;
  double baseline_risk = 0.0;
  std::optional<double> epsilon_hat;
  std::optional<std::uint64_t> required_n;
};

struct OptimizationResult {
  Algorithm algorithm = Algorithm::enumeration;
  Strategy strategy;
  double risk = 0.0;
  double baseline_risk = 0.0;
  double reduction_ratio = 0.0;  // 1 - risk / baseline_risk
  /// Every non-empty strategy whose risk was estimated.
  std::uint64_t scenarios_evaluated = 0;
  /// Strategies of exactly the budget size in the enumeration phase: the
  /// count tabulated for enumeration and algorithm one; for algorithm two it
  /// equals scenarios_evaluated.
  std::uint64_t scenarios_enumerated_at_budget = 0;
  std::vector<int> shortlist;        // algorithm one
  std::vector<int> selection_order;  // algorithm two
  bool smaller_subset_won = false;
  CredibilityReport credibility;
  std::vector<RoundRecord> history;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// C(n, k) with saturation at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);
/// Non-empty subsets of size <= k.
std::uint64_t subsets_up_to(std::uint64_t n, std::uint64_t k);
/// (2K - m + 1) m / 2.
std::uint64_t greedy_scenarios(std::uint64_t components, std::uint64_t m_max);

/// Exhaustive search over subsets of `candidates` of size <= m_max. Ties go
/// to the smaller subset, then the lexicographically smaller id list.
/// Throws RefusalError with the count above 10^7 subsets.
OptimizationResult enumerate_optimal(const RiskMatrices& m, int m_max, std::vector<int> candidates, double beta = 0.95,
                                     double eps_bar = 0.1);

OptimizationResult algorithm_one(const RiskMatrices& m, const OptimizerConfig& cfg);
OptimizationResult algorithm_two(const RiskMatrices& m, const OptimizerConfig& cfg);
OptimizationResult run_algorithm(const RiskMatrices& m, Algorithm alg, const OptimizerConfig& cfg);

struct SensitivityEntry {
  int component = 0;
  double risk = 0.0;
  double reduction_ratio = 0.0;
};

struct SensitivityReport {
  double baseline_risk = 0.0;
  std::vector<SensitivityEntry> entries;  // ascending risk, then id
  double mean_risk = 0.0;
  double mean_reduction_ratio = 0.0;
};

SensitivityReport sensitivity_report(const RiskMatrices& m);

/// Risk matrices over exactly `n` samples, growing the sample set as needed.
using MatricesProvider = std::function<const RiskMatrices&(std::size_t n)>;

/// Adaptive loop: optimize at n0 samples, grow to the required sample size of
/// the winning strategy and repeat until it is met or max_rounds is spent.
OptimizationResult procedure_one(const MatricesProvider& provide, Algorithm alg, const OptimizerConfig& cfg);

nlohmann::json to_json(const OptimizationResult& r);
nlohmann::json to_json(const SensitivityReport& r);
void write_sensitivity_csv(const SensitivityReport& r, std::ostream& out);

}  // namespace blackout

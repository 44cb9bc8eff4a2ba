#include "blackout/optimizer.hpp"

#include <algorithm>
#include <ostream>

#include "blackout/error.hpp"

namespace blackout {

namespace {

constexpr std::uint64_t kEnumerationCap = 10'000'000;

double reduction(double risk, double baseline) { return baseline > 0.0 ? 1.0 - risk / baseline : 0.0; }

std::vector<int> ids_of(const RiskMatrices& m, const std::vector<std::size_t>& rows) {
  std::vector<int> ids;
  for (auto r : rows) ids.push_back(m.component_ids[r]);
  return ids;
}

void finish(const RiskMatrices& m, OptimizationResult& r, double beta, double eps_bar) {
  r.strategy = r.strategy.sorted();
  r.baseline_risk = estimate_risk(m);
  r.reduction_ratio = reduction(r.risk, r.baseline_risk);
  if (m.n >= 2) r.credibility = credibility_report(m, r.strategy, beta, eps_bar);
}

// Best subset of `rows` (ascending) with at most m_max members. Subsets are
// visited by size, then lexicographically, and only a strictly lower risk
// replaces the incumbent, which realizes the tie-breaking order.
void search(const RiskMatrices& m, const std::vector<std::size_t>& rows, int m_max, OptimizationResult& r) {
  std::vector<std::size_t> best;
  double best_risk = estimate_risk_positions(m, {});
  std::vector<std::size_t> pick;
  std::vector<std::size_t> idx;
  for (int size = 1; size <= m_max; ++size) {
    idx.resize(static_cast<std::size_t>(size));
    for (int j = 0; j < size; ++j) idx[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);
    while (true) {
      pick.clear();
      for (auto j : idx) pick.push_back(rows[j]);
      const double risk = estimate_risk_positions(m, pick);
      ++r.scenarios_evaluated;
      if (size == m_max) ++r.scenarios_enumerated_at_budget;
      if (risk < best_risk) {
        best_risk = risk;
        best = pick;
      }
      // Next combination in lexicographic order.
      int j = size - 1;
      while (j >= 0 && idx[static_cast<std::size_t>(j)] == rows.size() - static_cast<std::size_t>(size - j)) --j;
      if (j < 0) break;
      ++idx[static_cast<std::size_t>(j)];
      for (auto t = static_cast<std::size_t>(j) + 1; t < idx.size(); ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  r.strategy.maintained = ids_of(m, best);
  r.risk = best_risk;
  r.smaller_subset_won = static_cast<int>(best.size()) < m_max;
}

std::vector<std::size_t> rows_of(const RiskMatrices& m, std::vector<int> ids) {
  Strategy s{std::move(ids)};
  return m.positions(s);
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::enumeration: return "enum";
    case Algorithm::one: return "one";
    case Algorithm::two: return "two";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& text) {
  if (text == "enum" || text == "enumeration") return Algorithm::enumeration;
  if (text == "one") return Algorithm::one;
  if (text == "two") return Algorithm::two;
  throw ValidationError("unknown algorithm \"" + text + "\" (expected enum, one or two)");
}

void OptimizerConfig::check(std::size_t components, Algorithm alg) const {
  const auto k = static_cast<long long>(components);
  if (m_max < 1 || m_max > k) throw ValidationError("m_max must lie in [1, number of maintainable components]");
  if (alg == Algorithm::one && (m_k < m_max || m_k > k))
    throw ValidationError("m_k must lie in [m_max, number of maintainable components]");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!(eps_bar > 0.0)) throw ValidationError("eps_bar must be > 0");
  if (!(y0 >= 0.0)) throw ValidationError("y0 must be >= 0");
  if (n0 < 2) throw ValidationError("n0 must be >= 2");
  if (max_rounds < 1) throw ValidationError("max_rounds must be >= 1");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t f = n - k + i;
    if (r > UINT64_MAX / f) return UINT64_MAX;
    r = r * f / i;
  }
  return r;
}

std::uint64_t subsets_up_to(std::uint64_t n, std::uint64_t k) {
  std::uint64_t total = 0;
  for (std::uint64_t j = 1; j <= std::min(n, k); ++j) {
    const auto c = binomial(n, j);
    if (c == UINT64_MAX || total > UINT64_MAX - c) return UINT64_MAX;
    total += c;
  }
  return total;
}

std::uint64_t greedy_scenarios(std::uint64_t components, std::uint64_t m_max) {
  return (2 * components - m_max + 1) * m_max / 2;
}

OptimizationResult enumerate_optimal(const RiskMatrices& m, int m_max, std::vector<int> candidates, double beta,
                                     double eps_bar) {
  const auto rows = rows_of(m, std::move(candidates));
  if (m_max < 0 || static_cast<std::size_t>(m_max) > rows.size())
    throw ValidationError("m_max must lie in [0, number of candidates]");
  const auto count = subsets_up_to(rows.size(), static_cast<std::uint64_t>(m_max));
  if (count > kEnumerationCap)
    throw RefusalError("enumeration would evaluate " + std::to_string(count) + " strategies (cap 10^7)", count);
  OptimizationResult r;
  r.algorithm = Algorithm::enumeration;
  search(m, rows, m_max, r);
  finish(m, r, beta, eps_bar);
  return r;
}

SensitivityReport sensitivity_report(const RiskMatrices& m) {
  SensitivityReport rep;
  rep.baseline_risk = estimate_risk(m);
  for (std::size_t k = 0; k < m.components(); ++k) {
    const std::size_t row[1] = {k};
    const double risk = estimate_risk_positions(m, row);
    rep.entries.push_back({m.component_ids[k], risk, reduction(risk, rep.baseline_risk)});
  }
  std::stable_sort(rep.entries.begin(), rep.entries.end(),
                   [](const SensitivityEntry& a, const SensitivityEntry& b) { return a.risk < b.risk; });
  if (!rep.entries.empty()) {
    double sr = 0.0, sq = 0.0;
    for (const auto& e : rep.entries) {
      sr += e.risk;
      sq += e.reduction_ratio;
    }
    rep.mean_risk = sr / static_cast<double>(rep.entries.size());
    rep.mean_reduction_ratio = sq / static_cast<double>(rep.entries.size());
  }
  return rep;
}

OptimizationResult algorithm_one(const RiskMatrices& m, const OptimizerConfig& cfg) {
  cfg.check(m.components(), Algorithm::one);
  const auto sens = sensitivity_report(m);
  std::vector<int> shortlist;
  for (std::size_t j = 0; j < static_cast<std::size_t>(cfg.m_k); ++j) shortlist.push_back(sens.entries[j].component);
  std::sort(shortlist.begin(), shortlist.end());

  const auto rows = rows_of(m, shortlist);
  const auto count = subsets_up_to(rows.size(), static_cast<std::uint64_t>(cfg.m_max));
  if (count > kEnumerationCap)
    throw RefusalError("enumeration would evaluate " + std::to_string(count) + " strategies (cap 10^7)", count);
  OptimizationResult r;
  r.algorithm = Algorithm::one;
  r.shortlist = shortlist;
  search(m, rows, cfg.m_max, r);
  r.scenarios_evaluated += m.components();
  finish(m, r, cfg.beta, cfg.eps_bar);
  return r;
}

OptimizationResult algorithm_two(const RiskMatrices& m, const OptimizerConfig& cfg) {
  cfg.check(m.components(), Algorithm::two);
  OptimizationResult r;
  r.algorithm = Algorithm::two;
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(m.components(), false);
  double risk = estimate_risk(m);
  for (int round = 0; round < cfg.m_max; ++round) {
    std::size_t best = m.components();
    double best_risk = 0.0;
    std::vector<std::size_t> trial;
    for (std::size_t k = 0; k < m.components(); ++k) {
      if (taken[k]) continue;
      trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), k), k);
      const double t = estimate_risk_positions(m, trial);
      ++r.scenarios_evaluated;
      if (best == m.components() || t < best_risk) {
        best = k;
        best_risk = t;
      }
    }
    taken[best] = true;
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best), best);
    r.selection_order.push_back(m.component_ids[best]);
    risk = best_risk;
  }
  r.scenarios_enumerated_at_budget = r.scenarios_evaluated;
  r.strategy.maintained = ids_of(m, chosen);
  r.risk = risk;
  finish(m, r, cfg.beta, cfg.eps_bar);
  return r;
}

OptimizationResult run_algorithm(const RiskMatrices& m, Algorithm alg, const OptimizerConfig& cfg) {
  switch (alg) {
    case Algorithm::enumeration:
      cfg.check(m.components(), alg);
      return enumerate_optimal(m, cfg.m_max, m.component_ids, cfg.beta, cfg.eps_bar);
    case Algorithm::one: return algorithm_one(m, cfg);
    case Algorithm::two: return algorithm_two(m, cfg);
  }
  throw InternalError("unknown algorithm");
}

OptimizationResult procedure_one(const MatricesProvider& provide, Algorithm alg, const OptimizerConfig& cfg) {
  std::size_t n = cfg.n0;
  std::vector<RoundRecord> history;
  for (int round = 1;; ++round) {
    const RiskMatrices& m = provide(n);
    if (m.n != n) throw InternalError("matrices provider returned the wrong sample count");
    auto result = run_algorithm(m, alg, cfg);
    const auto& cred = result.credibility;
    history.push_back({n, result.strategy, result.risk, result.baseline_risk, cred.epsilon_hat, cred.required_n});

    bool stop = false;
    if (!cred.required_n) {
      result.converged = false;
      result.warnings.push_back("zero risk estimate for the chosen strategy; credibility cannot be assessed");
      stop = true;
    } else if (*cred.required_n <= n) {
      result.converged = true;
      stop = true;
    } else if (round >= cfg.max_rounds) {
      result.converged = false;
      result.warnings.push_back("required sample size " + std::to_string(*cred.required_n) + " not reached after " +
                                std::to_string(round) + " rounds");
      stop = true;
    }
    if (stop) {
      result.history = std::move(history);
      return result;
    }
    n = static_cast<std::size_t>(*cred.required_n);
  }
}

nlohmann::json to_json(const OptimizationResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : r.history) {
    nlohmann::json row = {{"n", h.n},
                          {"strategy", strategy_to_json(h.strategy)},
                          {"risk", h.risk},
                          {"baseline_risk", h.baseline_risk},
                          {"epsilon_hat", nullptr},
                          {"required_n", nullptr}};
    if (h.epsilon_hat) row["epsilon_hat"] = *h.epsilon_hat;
    if (h.required_n) row["required_n"] = *h.required_n;
    hist.push_back(row);
  }
  nlohmann::json doc = {{"algorithm", to_string(r.algorithm)},
                        {"strategy", strategy_to_json(r.strategy)},
                        {"risk", r.risk},
                        {"baseline_risk", r.baseline_risk},
                        {"reduction_ratio", r.reduction_ratio},
                        {"scenarios_evaluated", r.scenarios_evaluated},
                        {"scenarios_enumerated_at_budget", r.scenarios_enumerated_at_budget},
                        {"smaller_subset_won", r.smaller_subset_won},
                        {"credibility", to_json(r.credibility)},
                        {"history", hist},
                        {"converged", r.converged},
                        {"warnings", r.warnings}};
  if (r.algorithm == Algorithm::one) doc["shortlist"] = r.shortlist;
  if (r.algorithm == Algorithm::two) doc["selection_order"] = r.selection_order;
  return doc;
}

nlohmann::json to_json(const SensitivityReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  int rank = 1;
  for (const auto& e : r.entries)
    entries.push_back({{"rank", rank++}, {"component", e.component}, {"risk", e.risk}, {"reduction_ratio", e.reduction_ratio}});
  return {{"baseline_risk", r.baseline_risk},
          {"entries", entries},
          {"mean", {{"risk", r.mean_risk}, {"reduction_ratio", r.mean_reduction_ratio}}}};
}

void write_sensitivity_csv(const SensitivityReport& r, std::ostream& out) {
  out.precision(17);
  out << "rank,component,risk,reduction_ratio\n";
  int rank = 1;
  for (const auto& e : r.entries) out << rank++ << ',' << e.component << ',' << e.risk << ',' << e.reduction_ratio << '\n';
  out << "mean,," << r.mean_risk << ',' << r.mean_reduction_ratio << '\n';
}

}  // namespace blackout

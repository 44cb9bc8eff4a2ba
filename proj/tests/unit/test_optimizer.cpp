#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "blackout/error.hpp"
#include "blackout/optimizer.hpp"
#include "fixtures.hpp"

using namespace blackout;

namespace {

// Best strategy by direct enumeration of bitmasks, as an independent check.
std::pair<Strategy, double> brute_force(const RiskMatrices& m, int m_max) {
  const std::size_t k = m.components();
  Strategy best;
  double best_risk = estimate_risk(m);
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    if (__builtin_popcount(mask) > m_max) continue;
    Strategy s;
    for (std::size_t j = 0; j < k; ++j)
      if (mask & (1u << j)) s.maintained.push_back(m.component_ids[j]);
    const double r = estimate_risk_strategy(m, s);
    if (r < best_risk) {
      best_risk = r;
      best = s;
    }
  }
  return {best, best_risk};
}

}  // namespace

TEST(Optimizer, Counts) {
  EXPECT_EQ(binomial(17, 4), 2380u);
  EXPECT_EQ(binomial(8, 4), 70u);
  EXPECT_EQ(binomial(10, 4), 210u);
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_EQ(binomial(200, 100), UINT64_MAX);
  EXPECT_EQ(subsets_up_to(17, 4), 17u + 136 + 680 + 2380);
  EXPECT_EQ(greedy_scenarios(17, 4), 62u);
}

TEST(Optimizer, EnumerationMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = fixtures::synthetic_matrices(9, 3000, seed);
    const auto r = enumerate_optimal(m, 3, m.component_ids);
    const auto [s, risk] = brute_force(m, 3);
    EXPECT_NEAR(r.risk, risk, 1e-12 * risk);
    EXPECT_EQ(r.strategy, s);
    EXPECT_EQ(r.scenarios_evaluated, subsets_up_to(9, 3));
    EXPECT_EQ(r.scenarios_enumerated_at_budget, binomial(9, 3));
  }
}

TEST(Optimizer, AlgorithmOneWithFullShortlistIsEnumeration) {
  const auto m = fixtures::synthetic_matrices(8, 2000, 21);
  OptimizerConfig cfg;
  cfg.m_max = 3;
  cfg.m_k = 8;
  const auto one = algorithm_one(m, cfg);
  const auto all = enumerate_optimal(m, 3, m.component_ids);
  EXPECT_EQ(one.strategy, all.strategy);
  EXPECT_EQ(one.scenarios_enumerated_at_budget, binomial(8, 3));
  EXPECT_EQ(one.shortlist.size(), 8u);
}

TEST(Optimizer, AlgorithmOneShortlistFollowsSensitivity) {
  const auto m = fixtures::synthetic_matrices(12, 2000, 5);
  OptimizerConfig cfg;
  cfg.m_k = 5;
  const auto r = algorithm_one(m, cfg);
  const auto sens = sensitivity_report(m);
  std::vector<int> expected;
  for (std::size_t j = 0; j < 5; ++j) expected.push_back(sens.entries[j].component);
  std::vector<int> got = r.shortlist;
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expected);
  EXPECT_EQ(r.scenarios_enumerated_at_budget, binomial(5, 4));
}

TEST(Optimizer, GreedyOnSeparableIsOptimal) {
  const auto m = fixtures::separable_matrices({0.9, 0.3, 1.2, 0.5, 0.7, 0.95}, 500, 3);
  OptimizerConfig cfg;
  cfg.m_max = 3;
  const auto two = algorithm_two(m, cfg);
  EXPECT_EQ(two.strategy, (Strategy{{2, 4, 5}}));
  EXPECT_EQ(two.selection_order, (std::vector<int>{2, 4, 5}));
  EXPECT_EQ(two.scenarios_evaluated, greedy_scenarios(6, 3));
  EXPECT_EQ(enumerate_optimal(m, 3, m.component_ids).strategy, two.strategy);
}

TEST(Optimizer, TiesPreferSmallerThenLexicographic) {
  // Components 1 and 2 are identical; component 3 is useless (ratio 1).
  const auto m = fixtures::separable_matrices({0.5, 0.5, 1.0}, 50, 8);
  const auto r = enumerate_optimal(m, 2, m.component_ids);
  EXPECT_EQ(r.strategy, (Strategy{{1, 2}}));
  const auto r1 = enumerate_optimal(m, 1, m.component_ids);
  EXPECT_EQ(r1.strategy, (Strategy{{1}}));
  OptimizerConfig cfg;
  cfg.m_max = 1;
  EXPECT_EQ(algorithm_two(m, cfg).strategy, (Strategy{{1}}));
  // Nothing helps: the empty strategy stays.
  const auto none = enumerate_optimal(fixtures::separable_matrices({1.0, 1.2}, 50, 1), 2, {1, 2});
  EXPECT_TRUE(none.strategy.empty());
  EXPECT_TRUE(none.smaller_subset_won);
}

TEST(Optimizer, RefusesHugeEnumeration) {
  const auto m = fixtures::synthetic_matrices(60, 10, 1);
  try {
    enumerate_optimal(m, 6, m.component_ids);
    FAIL();
  } catch (const RefusalError& e) {
    EXPECT_EQ(e.count(), subsets_up_to(60, 6));
  }
}

TEST(Optimizer, ConfigCheck) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.check(17, Algorithm::one));
  EXPECT_THROW(cfg.check(6, Algorithm::one), ValidationError);  // m_k > K
  EXPECT_NO_THROW(cfg.check(6, Algorithm::two));
  cfg.m_max = 0;
  EXPECT_THROW(cfg.check(17, Algorithm::two), ValidationError);
  EXPECT_EQ(algorithm_from_string("enum"), Algorithm::enumeration);
  EXPECT_STREQ(to_string(Algorithm::two), "two");
  EXPECT_THROW(algorithm_from_string("three"), ValidationError);
}

TEST(Optimizer, SensitivityOrdering) {
  const auto m = fixtures::synthetic_matrices(10, 3000, 2);
  const auto rep = sensitivity_report(m);
  ASSERT_EQ(rep.entries.size(), 10u);
  EXPECT_DOUBLE_EQ(rep.baseline_risk, estimate_risk(m));
  double mean = 0;
  for (std::size_t j = 0; j < rep.entries.size(); ++j) {
    const auto& e = rep.entries[j];
    EXPECT_DOUBLE_EQ(e.risk, estimate_risk_strategy(m, Strategy{{e.component}}));
    EXPECT_DOUBLE_EQ(e.reduction_ratio, 1.0 - e.risk / rep.baseline_risk);
    if (j) EXPECT_LE(rep.entries[j - 1].risk, e.risk);
    mean += e.risk;
  }
  EXPECT_NEAR(rep.mean_risk, mean / 10, 1e-12);
  std::stringstream csv;
  write_sensitivity_csv(rep, csv);
  std::string header;
  std::getline(csv, header);
  EXPECT_FALSE(header.empty());
}

TEST(Optimizer, ProcedureOneGrowsUntilCredible) {
  const auto full = fixtures::synthetic_matrices(6, 200000, 31, 0.05);
  std::vector<RiskMatrices> views;
  views.reserve(32);
  std::vector<std::size_t> requested;
  auto provide = [&](std::size_t n) -> const RiskMatrices& {
    requested.push_back(n);
    std::vector<double> shed(full.shed.begin(), full.shed.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> p, q;
    for (std::size_t k = 0; k < full.components(); ++k)
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(full.p_at(k, i));
        q.push_back(full.q_at(k, i));
      }
    views.push_back(make_matrices(full.component_ids, shed, p, q, 0.0));
    return views.back();
  };
  OptimizerConfig cfg;
  cfg.m_max = 2;
  cfg.n0 = 500;
  cfg.eps_bar = 0.1;
  const auto r = procedure_one(provide, Algorithm::enumeration, cfg);
  ASSERT_FALSE(r.history.empty());
  EXPECT_EQ(r.history.front().n, 500u);
  for (std::size_t j = 1; j < r.history.size(); ++j) EXPECT_GE(r.history[j].n, r.history[j - 1].n);
  if (r.converged) {
    EXPECT_LE(*r.credibility.epsilon_hat, 0.1 + 1e-12);
  }
  const auto doc = to_json(r);
  EXPECT_EQ(doc.at("history").size(), r.history.size());
}

TEST(Optimizer, ProcedureOneStopsAtRoundCap) {
  const auto base = fixtures::synthetic_matrices(4, 1000, 2, 0.02);
  std::vector<RiskMatrices> views;
  views.reserve(8);
  auto provide = [&](std::size_t n) -> const RiskMatrices& {
    // Always the same 1000 samples repeated: never credible at eps 0.001.
    std::vector<double> shed(n), p, q;
    for (std::size_t i = 0; i < n; ++i) shed[i] = base.shed[i % 1000];
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(base.p_at(k, i % 1000));
        q.push_back(base.q_at(k, i % 1000));
      }
    views.push_back(make_matrices(base.component_ids, shed, p, q, 0.0));
    return views.back();
  };
  OptimizerConfig cfg;
  cfg.m_max = 1;
  cfg.n0 = 1000;
  cfg.eps_bar = 0.02;
  cfg.max_rounds = 2;
  const auto r = procedure_one(provide, Algorithm::two, cfg);
  EXPECT_LE(r.history.size(), 2u);
}

// Acceptance suite. Each criterion prints one PASS/FAIL line plus details;
// the process exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "blackout/cascade.hpp"
#include "blackout/credibility.hpp"
#include "blackout/matpower.hpp"
#include "blackout/optimizer.hpp"
#include "blackout/risk.hpp"
#include "blackout/sample_set.hpp"
#include "blackout/tiny_system.hpp"
#include "fixtures.hpp"

using namespace blackout;
namespace fx = blackout::fixtures;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// Chain fixture shared by criteria 2, 4, 5 and 6.
struct Chain {
  TinySystem sys = fx::chain_three();
  FailureModel base = fx::chain_three_model();
  MaintenanceEffect effect = fx::chain_three_effect();
  Strategy strategy = fx::chain_three_strategy();
  std::vector<int> ids{1, 2, 3};

  double exact() const { return exact_risk_tiny(sys, base.with_maintenance(effect, strategy.maintained), 0.0); }

  std::vector<CascadeSample> draw(std::uint64_t seed, std::uint64_t first, std::size_t n) const {
    const SampleFn fn = [this](RandomStream& rng) { return simulate_tiny(sys, base, rng); };
    return draw_samples(fn, seed, first, n, 1);
  }

  RiskMatrices matrices(const std::vector<CascadeSample>& s) const {
    return build_matrices(s, base, effect, 0.0, ids);
  }

  // Exact variance of one reweighted term under the baseline: E[w^2 c^2] - R^2.
  double exact_term_variance() const {
    const auto f = base.with_maintenance(effect, strategy.maintained);
    double second = 0.0;
    for (const auto& [events, g] : path_probabilities_tiny(sys, base)) {
      if (g == 0.0) continue;
      unsigned mask = 0;
      CascadeSample s;
      for (const auto& e : events) {
        mask |= 1u << (std::find(ids.begin(), ids.end(), e.branch) - ids.begin());
        s.events.push_back(e);
      }
      const double c = sys.shed[mask];
      // Path probability under f relative to g, from the per-path table.
      double fz = 0.0;
      for (const auto& [ev2, p2] : path_probabilities_tiny(sys, f))
        if (ev2 == events) fz = p2;
      const double w = fz / g;
      second += g * w * w * c * c;
    }
    const double r = exact();
    return second - r * r;
  }
};

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto net = fx::five_branch();
  const auto model = fx::uniform_model(net, {0.08, 0.9, 0.8, 1.2});
  const CascadeSimulator sim(net, model, {100, true});
  const auto set = generate_samples(sim, 1000, 20240901);
  double worst = 0.0;
  int cascades = 0;
  for (const auto& s : set.samples) {
    const double a = sample_probability(s, model);
    const double b = sample_probability_by_components(s, model);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    cascades += s.stages > 0;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 1e-12 && secs < 10.0;
  o.detail = "max relative difference " + fmt("%.3e", worst) + " over 1000 samples (" + std::to_string(cascades) +
             " with failures), " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const Chain ch;
  const double exact = ch.exact();
  std::vector<double> est;
  for (std::uint64_t set = 0; set < 200; ++set) {
    const auto m = ch.matrices(ch.draw(1'000'000 + set, 0, 10000));
    est.push_back(estimate_risk_strategy(m, ch.strategy));
  }
  const double mean = mean_of(est);
  const double se = std::sqrt(var_of(est) / est.size());
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = std::abs(mean - exact) <= 3 * se && secs < 300;
  o.detail = "exact " + fmt("%.6f", exact) + ", mean of 200 estimates " + fmt("%.6f", mean) + ", deviation " +
             fmt("%.2f", std::abs(mean - exact) / se) + " SE, " + fmt("%.1f", secs) + " s";
  return o;
}

struct ConsistencyRun {
  int agree = 0;
  double worst = 0.0;
  double first_reweighted = 0.0, first_direct = 0.0;
};

// Reweighted g-sample estimate against direct f-sample estimate, 40 trials.
ConsistencyRun consistency_trials(const Network& net, const FailureModel& base, const MaintenanceEffect& effect,
                                  const Strategy& strategy, std::uint64_t seed) {
  const auto perturbed = base.with_maintenance(effect, strategy.maintained);
  const CascadeSimulator g_sim(net, base);
  const CascadeSimulator f_sim(net, perturbed);
  const std::size_t n = 100000;
  ConsistencyRun run;
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const auto g = generate_samples(g_sim, n, seed + trial, 0);
    const auto m = build_matrices(g, base, effect, 0.0, g_sim.traced_ids());
    const auto rw = credibility_report(m, strategy, 0.95, 0.1);

    const auto f = generate_samples(f_sim, n, seed + 1000 + trial, 0);
    std::vector<double> c;
    c.reserve(n);
    for (const auto& s : f.samples) c.push_back(s.shed);
    const double direct = mean_of(c);
    const auto dr = credibility_from_terms(c, direct, 0.95, 0.1);

    const double gap = std::abs(rw.risk - direct);
    const double allowed = rw.absolute_half_width + dr.absolute_half_width;
    run.agree += gap <= allowed;
    run.worst = std::max(run.worst, gap / allowed);
    if (trial == 0) {
      run.first_reweighted = rw.risk;
      run.first_direct = direct;
    }
  }
  return run;
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const auto net = load_matpower(fx::data_path("case57.m"));
  const auto base = FailureModel::for_network(net);
  const Strategy strategy{{31, 46, 73, 80}};

  // The configured maintenance effect: p_base and p_peak scaled by 0.1.
  const auto main = consistency_trials(net, base, MaintenanceEffect::scale(0.1), strategy, 3'000'000);

  // Control: same p_base reduction with p_peak kept, so Q/P stays bounded.
  FailureParams kept = kDefaultTransformerParams;
  kept.p_base *= 0.1;
  const auto control = consistency_trials(net, base, MaintenanceEffect::replace(kept), strategy, 4'000'000);

  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = main.agree >= 38 && secs < 1800;
  o.detail = std::to_string(main.agree) + "/40 trials within the summed 95% half-widths under scale 0.1 (worst gap " +
             fmt("%.2f", main.worst) + " of allowance; trial 0 reweighted " + fmt("%.4f", main.first_reweighted) +
             " vs direct " + fmt("%.4f", main.first_direct) + "); control with p_peak kept: " +
             std::to_string(control.agree) + "/40 (trial 0 " + fmt("%.4f", control.first_reweighted) + " vs " +
             fmt("%.4f", control.first_direct) + "); " + fmt("%.0f", secs) + " s";
  if (!o.pass)
    o.detail += "; overloaded maintained components survive with probability 0.9 under the maintained model but "
                "0.001 under the baseline, so the baseline samples almost never visit the paths that carry the "
                "maintained risk";
  return o;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  const Chain ch;
  std::vector<double> est, dhat;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    const auto m = ch.matrices(ch.draw(5'000'000 + rep, 0, 10000));
    const double r = estimate_risk_strategy(m, ch.strategy);
    est.push_back(r);
    dhat.push_back(estimate_variance(m, ch.strategy, r).variance);
  }
  const double empirical = var_of(est);
  const double mean_d = mean_of(dhat);
  const double exact = ch.exact_term_variance() / 10000.0;
  const double rel = std::abs(mean_d - empirical) / empirical;
  Outcome o;
  o.pass = rel <= 0.10 && seconds_since(t0) < 300;
  o.detail = "mean D-hat " + fmt("%.6e", mean_d) + ", empirical variance " + fmt("%.6e", empirical) + " (exact " +
             fmt("%.6e", exact) + "), relative gap " + fmt("%.3f", rel);
  return o;
}

Outcome criterion5() {
  const Chain ch;
  const double exact = ch.exact();
  int covered = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto m = ch.matrices(ch.draw(6'000'000 + rep, 0, 10000));
    const auto r = credibility_report(m, ch.strategy, 0.9, 0.1);
    covered += r.interval_lo <= exact && exact <= r.interval_hi;
  }
  const double coverage = covered / 200.0;
  Outcome o;
  o.pass = std::abs(coverage - 0.90) <= 0.05;
  o.detail = "coverage " + fmt("%.3f", coverage) + " (" + std::to_string(covered) + "/200) at beta 0.9";
  return o;
}

Outcome criterion6() {
  const auto nbar = required_samples(4.0, 2.0, 0.95, 0.1);
  const Chain ch;
  // Target error putting the required size near 5e4 for this fixture.
  const double z = two_sided_z(0.95);
  const double cv2 = ch.exact_term_variance() / std::pow(ch.exact(), 2);
  const double eps_bar = z * std::sqrt(cv2 / 50000.0);
  int ok = 0;
  std::size_t min_n = SIZE_MAX, max_n = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const std::uint64_t seed = 7'000'000 + trial;
    auto samples = ch.draw(seed, 0, 10000);
    auto m = ch.matrices(samples);
    const auto first = credibility_report(m, ch.strategy, 0.95, eps_bar);
    const std::size_t target = std::max<std::size_t>(samples.size(), *first.required_n);
    const auto more = ch.draw(seed, samples.size(), target - samples.size());
    samples.insert(samples.end(), more.begin(), more.end());
    m = ch.matrices(samples);
    const auto grown = credibility_report(m, ch.strategy, 0.95, eps_bar);
    ok += *grown.epsilon_hat <= 1.1 * eps_bar;
    min_n = std::min(min_n, target);
    max_n = std::max(max_n, target);
  }
  Outcome o;
  o.pass = nbar == 385 && ok >= 45;
  o.detail = "N-bar(d=4, R=2, 0.95, 0.1) = " + std::to_string(nbar) + "; eps-bar " + fmt("%.4f", eps_bar) +
             ", grown sizes " + std::to_string(min_n) + ".." + std::to_string(max_n) + ", " + std::to_string(ok) +
             "/50 trials with eps-hat <= 1.1 eps-bar";
  return o;
}

Outcome criterion7() {
  const auto net = load_matpower(fx::data_path("case57.m"));
  const auto base = FailureModel::for_network(net);
  const CascadeSimulator sim(net, base);
  const auto set = generate_samples(sim, 5000, 57, 0);
  const auto m = build_matrices(set, base, MaintenanceEffect::scale(0.1), 0.0, sim.traced_ids());
  OptimizerConfig cfg;
  cfg.m_max = 4;
  const auto all = run_algorithm(m, Algorithm::enumeration, cfg);
  cfg.m_k = 8;
  const auto one8 = run_algorithm(m, Algorithm::one, cfg);
  cfg.m_k = 10;
  const auto one10 = run_algorithm(m, Algorithm::one, cfg);
  const auto two = run_algorithm(m, Algorithm::two, cfg);
  Outcome o;
  o.pass = m.components() == 17 && all.scenarios_enumerated_at_budget == 2380 &&
           one8.scenarios_enumerated_at_budget == 70 && one10.scenarios_enumerated_at_budget == 210 &&
           two.scenarios_evaluated == 62;
  o.detail = "|K*| " + std::to_string(m.components()) + "; enumeration " +
             std::to_string(all.scenarios_enumerated_at_budget) + ", algorithm I " +
             std::to_string(one8.scenarios_enumerated_at_budget) + " (M_k 8) and " +
             std::to_string(one10.scenarios_enumerated_at_budget) + " (M_k 10), algorithm II " +
             std::to_string(two.scenarios_evaluated);
  return o;
}

Outcome criterion8() {
  OptimizerConfig cfg;
  cfg.m_max = 4;
  cfg.m_k = 12;
  int one_match = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = fx::synthetic_matrices(12, 5000, 8'000 + seed);
    one_match += run_algorithm(m, Algorithm::one, cfg).strategy == run_algorithm(m, Algorithm::enumeration, cfg).strategy;
  }
  int sep_match = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(9'000 + seed);
    std::uniform_real_distribution<double> u(0.2, 1.3);
    std::vector<double> r(12);
    for (auto& x : r) x = u(rng);
    const auto m = fx::separable_matrices(r, 2000, seed);
    sep_match += run_algorithm(m, Algorithm::two, cfg).strategy == run_algorithm(m, Algorithm::enumeration, cfg).strategy;
  }
  int close = 0;
  std::string suboptimal;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto m = fx::synthetic_matrices(12, 5000, 10'000 + seed);
    const auto best = run_algorithm(m, Algorithm::enumeration, cfg);
    const auto greedy = run_algorithm(m, Algorithm::two, cfg);
    const double gap = (greedy.risk - best.risk) / best.risk;
    close += gap <= 0.05;
    if (greedy.strategy != best.strategy) suboptimal += " " + std::to_string(seed) + ":" + fmt("%.4f", gap);
  }
  Outcome o;
  o.pass = one_match == 20 && sep_match == 20 && close >= 45;
  o.detail = "algorithm I = enumeration on " + std::to_string(one_match) + "/20, algorithm II = enumeration on " +
             std::to_string(sep_match) + "/20 separable, greedy gap <= 5% on " + std::to_string(close) +
             "/50; sub-optimal (seed:gap)" + (suboptimal.empty() ? " none" : suboptimal);
  return o;
}

Outcome criterion9() {
  const auto net = load_matpower(fx::data_path("case57.m"));
  const auto base = FailureModel::for_network(net);
  const auto effect = MaintenanceEffect::scale(0.1);
  const CascadeSimulator sim(net, base);
  OptimizerConfig cfg;
  cfg.n0 = 5000;
  cfg.eps_bar = 0.1;
  cfg.beta = 0.95;
  cfg.m_max = 4;

  auto run = [&] {
    SampleSet set{sim.network_hash(), sim.model_hash(), 909, {}};
    RiskMatrices current;
    const MatricesProvider provide = [&](std::size_t n) -> const RiskMatrices& {
      extend_samples(sim, set, n, 0);
      current = build_matrices(std::span(set.samples).first(n), base, effect, 0.0, sim.traced_ids());
      return current;
    };
    return procedure_one(provide, Algorithm::enumeration, cfg);
  };
  const auto t0 = Clock::now();
  const auto a = run();
  const double secs = seconds_since(t0);
  const auto b = run();
  bool monotone = true;
  std::string trace;
  for (std::size_t j = 0; j < a.history.size(); ++j) {
    if (j && a.history[j].n < a.history[j - 1].n) monotone = false;
    trace += " n=" + std::to_string(a.history[j].n) + " eps=" +
             (a.history[j].epsilon_hat ? fmt("%.4f", *a.history[j].epsilon_hat) : std::string("-"));
  }
  const bool replay = to_json(a).dump() == to_json(b).dump();
  const bool credible = a.converged && a.credibility.epsilon_hat && *a.credibility.epsilon_hat <= cfg.eps_bar;
  Outcome o;
  o.pass = a.history.size() <= 5 && credible && monotone && replay;
  o.detail = std::to_string(a.history.size()) + " rounds:" + trace + "; strategy " +
             strategy_to_json(a.strategy).dump() + ", replay " + (replay ? "identical" : "DIFFERS") + ", " +
             fmt("%.1f", secs) + " s";
  return o;
}

Outcome criterion10() {
  const auto net = load_matpower(fx::data_path("case57.m"));
  const CascadeSimulator sim(net, FailureModel::for_network(net));
  auto t0 = Clock::now();
  generate_samples(sim, 10000, 10, 1);
  const double serial = seconds_since(t0);

  // Speedup on a heavier workload: 300-bus cascades with raised failure rates.
  const auto net300 = load_matpower(fx::data_path("case300.m"));
  FailureParams hot = kDefaultLineParams;
  hot.p_base = 2e-3;
  const CascadeSimulator sim300(net300, FailureModel::for_network(net300, hot, hot));
  t0 = Clock::now();
  const auto s1 = generate_samples(sim300, 200, 11, 1);
  const double t1 = seconds_since(t0);
  t0 = Clock::now();
  const auto s8 = generate_samples(sim300, 200, 11, 8);
  const double t8 = seconds_since(t0);
  const double speedup = t1 / t8;
  const bool identical = s1 == s8;

  auto m = fx::synthetic_matrices(107, 100000, 12, 1.0);
  const Strategy s{{m.component_ids[5], m.component_ids[40], m.component_ids[77], m.component_ids[100]}};
  double best_ms = 1e9, sink = 0;
  for (int rep = 0; rep < 5; ++rep) {
    t0 = Clock::now();
    sink += estimate_risk_strategy(m, s);
    best_ms = std::min(best_ms, 1e3 * seconds_since(t0));
  }
  t0 = Clock::now();
  const auto cred = credibility_report(m, s, 0.95, 0.1);
  const double cred_ms = 1e3 * seconds_since(t0);

  const unsigned cores = std::thread::hardware_concurrency();
  Outcome o;
  const bool fast = serial < 300 && best_ms < 50;
  const bool scales = speedup >= 0.6 * 8;
  o.pass = fast && scales && identical;
  o.detail = "10^4 samples in " + fmt("%.2f", serial) + " s; 8-worker speedup " + fmt("%.2f", speedup) +
             " (need >= 4.8, " + std::to_string(cores) + " hardware thread(s)), results " +
             (identical ? "identical" : "DIFFER") + "; strategy evaluation " + fmt("%.2f", best_ms) +
             " ms (with credibility " + fmt("%.2f", cred_ms) + " ms, risk " + fmt("%.4g", cred.risk + 0 * sink) + ")";
  if (!scales && cores < 8) o.detail += "; speedup cannot be demonstrated on this machine";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance criteria");
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion number(s), 1-10; all when omitted")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    selected.resize(10);
    std::iota(selected.begin(), selected.end(), 1);
  }
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  bool all = true;
  for (int c : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

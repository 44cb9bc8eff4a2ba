#include "blackout/tiny_system.hpp"

#include <algorithm>
#include <map>

#include "blackout/error.hpp"

namespace blackout {

namespace {

constexpr std::uint64_t kPathCap = 10'000'000;

using Mask = std::uint32_t;

std::vector<FailureParams> params_of(const TinySystem& sys, const FailureModel& model) {
  std::vector<FailureParams> out;
  for (int id : sys.ids) out.push_back(model.params(id));
  return out;
}

}  // namespace

double TinySystem::total_demand() const {
  double m = 0.0;
  for (double s : shed) m = std::max(m, s);
  return m;
}

void TinySystem::check() const {
  if (ids.empty() || ids.size() > 6) throw ValidationError("tiny system needs 1 to 6 components");
  const std::size_t states = std::size_t{1} << ids.size();
  if (loading.size() != states || shed.size() != states)
    throw ValidationError("tiny system tables need one row per failure set");
  for (const auto& row : loading) {
    if (row.size() != ids.size()) throw ValidationError("tiny system loading row has the wrong width");
    for (double l : row)
      if (!(l >= 0.0)) throw ValidationError("tiny system loading ratios must be >= 0");
  }
  for (double s : shed)
    if (!(s >= 0.0)) throw ValidationError("tiny system shed must be >= 0");
  if (stage_cap < 1) throw ValidationError("stage cap must be >= 1");
}

CascadeSample simulate_tiny(const TinySystem& sys, const FailureModel& model, RandomStream& rng) {
  const auto params = params_of(sys, model);
  const std::size_t k = sys.size();
  CascadeSample sample;
  sample.substream = rng.index();
  for (int id : sys.ids) sample.traces.push_back({id, {}});
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sys.ids[a] < sys.ids[b]; });
  std::sort(sample.traces.begin(), sample.traces.end(),
            [](const LoadingTrace& a, const LoadingTrace& b) { return a.branch < b.branch; });

  Mask failed = 0;
  for (int stage = 0;; ++stage) {
    Mask tripped = 0;
    for (std::size_t slot = 0; slot < k; ++slot) {
      const std::size_t i = order[slot];
      if (failed & (Mask{1} << i)) continue;
      const double l = sys.loading[failed][i];
      sample.traces[slot].loading.push_back(l);
      if (rng.bernoulli(params[i].probability(l))) tripped |= Mask{1} << i;
    }
    if (!tripped) {
      sample.stages = stage;
      break;
    }
    for (std::size_t slot = 0; slot < k; ++slot) {
      const std::size_t i = order[slot];
      if (!(tripped & (Mask{1} << i))) continue;
      sample.events.push_back({stage, sys.ids[i]});
      sample.fail_stage[sys.ids[i]] = stage;
    }
    failed |= tripped;
    if (stage + 1 == sys.stage_cap) {
      sample.stages = sys.stage_cap;
      sample.truncated = true;
      break;
    }
  }
  sample.shed = sys.shed[failed];
  return sample;
}

namespace {

// Walks every path from (failed, stage), calling leaf(prob, final mask, events).
template <typename Leaf>
void walk(const TinySystem& sys, const std::vector<FailureParams>& params, Mask failed, int stage, double prob,
          std::vector<CascadeEvent>& events, Leaf&& leaf) {
  const std::size_t k = sys.size();
  const Mask all = (Mask{1} << k) - 1;
  const Mask alive = all & ~failed;
  std::vector<double> phi(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    if (alive & (Mask{1} << i)) phi[i] = params[i].probability(sys.loading[failed][i]);

  // Enumerate subsets F of the alive set, the empty one included.
  for (Mask f = alive;; f = (f - 1) & alive) {
    double p = prob;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(alive & (Mask{1} << i))) continue;
      p *= (f & (Mask{1} << i)) ? phi[i] : 1.0 - phi[i];
    }
    if (f == 0) {
      leaf(p, failed, events);
    } else {
      const auto mark = events.size();
      std::vector<std::pair<int, int>> add;
      for (std::size_t i = 0; i < k; ++i)
        if (f & (Mask{1} << i)) add.push_back({sys.ids[i], stage});
      std::sort(add.begin(), add.end());
      for (auto [id, st] : add) events.push_back({st, id});
      if (stage + 1 == sys.stage_cap) leaf(p, failed | f, events);
      else walk(sys, params, failed | f, stage + 1, p, events, leaf);
      events.resize(mark);
    }
    if (f == 0) break;
  }
}

std::uint64_t paths_from(const TinySystem& sys, Mask failed, int stage, std::map<std::pair<Mask, int>, std::uint64_t>& memo) {
  const auto key = std::make_pair(failed, stage);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const Mask all = (Mask{1} << sys.size()) - 1;
  const Mask alive = all & ~failed;
  std::uint64_t n = 1;  // no further failure
  for (Mask f = alive; f; f = (f - 1) & alive) {
    n += stage + 1 == sys.stage_cap ? 1 : paths_from(sys, failed | f, stage + 1, memo);
    if (n > kPathCap) break;
  }
  memo[key] = n;
  return n;
}

void require_enumerable(const TinySystem& sys) {
  sys.check();
  const auto n = count_paths_tiny(sys);
  if (n > kPathCap) throw RefusalError("cascade space has more than 10^7 paths", n);
}

}  // namespace

std::uint64_t count_paths_tiny(const TinySystem& sys) {
  sys.check();
  std::map<std::pair<Mask, int>, std::uint64_t> memo;
  return paths_from(sys, 0, 0, memo);
}

double exact_risk_tiny(const TinySystem& sys, const FailureModel& model, double y0) {
  require_enumerable(sys);
  const auto params = params_of(sys, model);
  std::vector<CascadeEvent> events;
  double risk = 0.0;
  walk(sys, params, 0, 0, 1.0, events, [&](double p, Mask final_mask, const std::vector<CascadeEvent>&) {
    const double h = sys.shed[final_mask];
    if (h >= y0) risk += p * h;
  });
  return risk;
}

std::vector<std::pair<std::vector<CascadeEvent>, double>> path_probabilities_tiny(const TinySystem& sys,
                                                                                   const FailureModel& model) {
  require_enumerable(sys);
  const auto params = params_of(sys, model);
  std::vector<CascadeEvent> events;
  std::vector<std::pair<std::vector<CascadeEvent>, double>> out;
  walk(sys, params, 0, 0, 1.0, events,
       [&](double p, Mask, const std::vector<CascadeEvent>& ev) { out.emplace_back(ev, p); });
  return out;
}

}  // namespace blackout

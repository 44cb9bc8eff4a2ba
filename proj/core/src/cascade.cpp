#include "blackout/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "blackout/error.hpp"
#include "blackout/hashing.hpp"
#include "blackout/network_json.hpp"

namespace blackout {

const LoadingTrace* CascadeSample::trace(int branch) const {
  const auto it = std::lower_bound(traces.begin(), traces.end(), branch,
                                   [](const LoadingTrace& t, int id) { return t.branch < id; });
  return it != traces.end() && it->branch == branch ? &*it : nullptr;
}

std::optional<int> CascadeSample::failure_stage(int branch) const {
  const auto it = fail_stage.find(branch);
  if (it == fail_stage.end()) return std::nullopt;
  return it->second;
}

nlohmann::json sample_to_json(const CascadeSample& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) events.push_back({e.stage, e.branch});
  nlohmann::json fail = nlohmann::json::object();
  for (const auto& [id, stage] : s.fail_stage) fail[std::to_string(id)] = stage;
  nlohmann::json traces = nlohmann::json::object();
  for (const auto& t : s.traces) traces[std::to_string(t.branch)] = t.loading;
  return {{"substream", s.substream}, {"stages", s.stages},   {"shed", s.shed},   {"truncated", s.truncated},
          {"events", events},         {"fail_stage", fail},   {"traces", traces}};
}

namespace {

int parse_id(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    const int id = std::stoi(key, &used);
    if (used == key.size()) return id;
  } catch (const std::exception&) {
  }
  throw SchemaError(path + "." + key, "expected an integer component id as key");
}

const nlohmann::json& field(const nlohmann::json& doc, const char* key, const std::string& path) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

}  // namespace

CascadeSample sample_from_json(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  CascadeSample s;
  try {
    s.substream = field(doc, "substream", path).get<std::uint64_t>();
    s.stages = field(doc, "stages", path).get<int>();
    s.shed = field(doc, "shed", path).get<double>();
    s.truncated = field(doc, "truncated", path).get<bool>();
    for (const auto& e : field(doc, "events", path)) s.events.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    for (const auto& [key, value] : field(doc, "fail_stage", path).items())
      s.fail_stage[parse_id(key, path + ".fail_stage")] = value.get<int>();
    for (const auto& [key, value] : field(doc, "traces", path).items())
      s.traces.push_back({parse_id(key, path + ".traces"), value.get<std::vector<double>>()});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, std::string("malformed sample: ") + e.what());
  }
  std::sort(s.traces.begin(), s.traces.end(),
            [](const LoadingTrace& a, const LoadingTrace& b) { return a.branch < b.branch; });
  return s;
}

std::vector<std::string> check_sample(const CascadeSample& s, double total_demand, int stage_cap) {
  std::vector<std::string> out;
  if (!(s.shed >= 0.0)) out.push_back("shed must be >= 0");
  if (s.shed > total_demand + 1e-6) out.push_back("shed exceeds total demand");
  if (s.stages < 0 || s.stages > stage_cap) out.push_back("stage count outside [0, stage cap]");
  for (const auto& e : s.events) {
    const auto it = s.fail_stage.find(e.branch);
    if (it == s.fail_stage.end() || it->second != e.stage)
      out.push_back("event (" + std::to_string(e.stage) + ", " + std::to_string(e.branch) +
                    ") has no matching fail_stage entry");
  }
  if (s.fail_stage.size() != s.events.size()) out.push_back("fail_stage and events disagree in size");
  const int draws = s.truncated ? s.stages : s.stages + 1;
  for (const auto& t : s.traces) {
    const auto failed = s.failure_stage(t.branch);
    const auto expected = static_cast<std::size_t>(failed ? *failed + 1 : draws);
    if (t.loading.size() != expected)
      out.push_back("trace of component " + std::to_string(t.branch) + " has length " +
                    std::to_string(t.loading.size()) + ", expected " + std::to_string(expected));
  }
  return out;
}

nlohmann::json CascadeOptions::to_json() const {
  return {{"stage_cap", stage_cap},
          {"full_traces", full_traces},
          {"lp_weights", {{"shed", weights.shed}, {"redispatch", weights.redispatch}}}};
}

CascadeSimulator::CascadeSimulator(Network net, FailureModel model, CascadeOptions options)
    : net_(std::move(net)), index_(net_), model_(std::move(model)), options_(options) {
  require_valid(net_);
  if (options_.stage_cap < 1) throw ValidationError("stage cap must be >= 1");

  trace_slot_.assign(net_.branches.size(), -1);
  for (std::size_t b = 0; b < net_.branches.size(); ++b) {
    const auto& br = net_.branches[b];
    params_.push_back(model_.params(br.id));
    if (options_.full_traces || br.maintainable) traced_ids_.push_back(br.id);
  }
  std::sort(traced_ids_.begin(), traced_ids_.end());
  for (std::size_t b = 0; b < net_.branches.size(); ++b) {
    const auto it = std::lower_bound(traced_ids_.begin(), traced_ids_.end(), net_.branches[b].id);
    if (it != traced_ids_.end() && *it == net_.branches[b].id) trace_slot_[b] = it - traced_ids_.begin();
  }

  OperatingPoint initial;
  for (const auto& g : net_.generators) initial.dispatch.push_back(g.dispatch);
  for (const auto& l : net_.loads) initial.served.push_back(l.served);
  auto base = evaluate(all_in_service(net_), initial);
  base_loading_ = std::move(base.loading);
  base_op_ = std::move(base.op);
  outage_cache_ = std::make_shared<OutageCache>(net_.branches.size());
}

const CascadeSimulator::StageState& CascadeSimulator::single_outage(std::size_t b) const {
  auto& cache = *outage_cache_;
  std::call_once(cache.once[b], [&] {
    Topology topology = all_in_service(net_);
    topology[b] = false;
    cache.states[b] = evaluate(topology, base_op_);
  });
  return cache.states[b];
}

std::vector<double> CascadeSimulator::loading_ratios(std::span<const double> flows, const Topology& topology) const {
  std::vector<double> out(flows.size(), 0.0);
  for (std::size_t b = 0; b < flows.size(); ++b)
    if (topology[b]) out[b] = std::abs(flows[b]) / net_.branches[b].flow_limit;
  return out;
}

CascadeSimulator::StageState CascadeSimulator::evaluate(const Topology& topology, const OperatingPoint& carried) const {
  const TopologyAnalysis analysis(net_, index_, topology);
  std::vector<double> dispatch = carried.dispatch;
  std::vector<double> served = carried.served;
  balance_islands(net_, index_, analysis.islands(), dispatch, served);
  const auto inj = bus_injections(net_, index_, dispatch, served);
  StageState state;
  state.loading = loading_ratios(analysis.flows(inj), topology);
  state.op = redispatch(net_, index_, analysis, carried.dispatch, options_.weights);
  return state;
}

CascadeSample CascadeSimulator::simulate(RandomStream& rng) const {
  CascadeSample sample;
  sample.substream = rng.index();
  sample.traces.reserve(traced_ids_.size());
  for (int id : traced_ids_) sample.traces.push_back({id, {}});

  Topology topology = all_in_service(net_);
  const std::vector<double>* loading = &base_loading_;
  const OperatingPoint* op = &base_op_;
  StageState current;
  std::vector<std::size_t> tripped;

  for (int stage = 0;; ++stage) {
    tripped.clear();
    for (std::size_t b = 0; b < topology.size(); ++b) {
      if (!topology[b]) continue;
      const double l = (*loading)[b];
      if (rng.bernoulli(params_[b].probability(l))) tripped.push_back(b);
      if (trace_slot_[b] >= 0) sample.traces[static_cast<std::size_t>(trace_slot_[b])].loading.push_back(l);
    }
    if (tripped.empty()) {
      sample.stages = stage;
      sample.shed = op->shed;
      break;
    }
    for (auto b : tripped) {
      const int id = net_.branches[b].id;
      sample.events.push_back({stage, id});
      sample.fail_stage[id] = stage;
      topology[b] = false;
    }
    if (stage == 0 && tripped.size() == 1) {
      const auto& cached = single_outage(tripped.front());
      loading = &cached.loading;
      op = &cached.op;
    } else {
      current = evaluate(topology, *op);
      loading = &current.loading;
      op = &current.op;
    }
    if (stage + 1 == options_.stage_cap) {
      sample.stages = options_.stage_cap;
      sample.truncated = true;
      sample.shed = op->shed;
      break;
    }
  }
  return sample;
}

std::string CascadeSimulator::network_hash() const { return json_digest(network_to_json(net_)); }

std::string CascadeSimulator::model_hash() const {
  return json_digest(nlohmann::json{{"failure_model", model_.to_json()}, {"options", options_.to_json()}});
}

CascadeSample simulate_cascade(const Network& net, const FailureModel& baseline, RandomStream& rng,
                               const CascadeOptions& options) {
  const CascadeSimulator sim(net, baseline, options);
  return sim.simulate(rng);
}

double gamma_factor(std::span<const double> phi, const CascadeSample& sample, int k) {
  const auto* trace = sample.trace(k);
  if (!trace) throw Error("no loading trace for component " + std::to_string(k) + " in this sample");
  if (phi.size() != trace->loading.size())
    throw ValidationError("phi sequence length does not match the trace of component " + std::to_string(k));
  if (phi.empty()) return 1.0;
  const bool failed = sample.fail_stage.contains(k);
  const std::size_t survived = failed ? phi.size() - 1 : phi.size();
  double g = 1.0;
  for (std::size_t j = 0; j < survived; ++j) g *= 1.0 - phi[j];
  if (failed) g *= phi.back();
  return g;
}

double gamma_factor(const FailureParams& params, const CascadeSample& sample, int k) {
  const auto* trace = sample.trace(k);
  if (!trace) throw Error("no loading trace for component " + std::to_string(k) + " in this sample");
  const auto& l = trace->loading;
  if (l.empty()) return 1.0;
  const bool failed = sample.fail_stage.contains(k);
  const std::size_t survived = failed ? l.size() - 1 : l.size();
  double g = 1.0;
  for (std::size_t j = 0; j < survived; ++j) g *= 1.0 - params.probability(l[j]);
  if (failed) g *= params.probability(l.back());
  return g;
}

namespace {

void require_full_traces(const CascadeSample& sample, const FailureModel& models) {
  for (const auto& [id, p] : models.components())
    if (!sample.trace(id))
      throw Error("sample lacks the trace of component " + std::to_string(id) +
                  "; full traces are required for the path probability");
}

}  // namespace

double sample_probability(const CascadeSample& sample, const FailureModel& models) {
  require_full_traces(sample, models);
  std::size_t draws = 0;
  for (const auto& t : sample.traces) draws = std::max(draws, t.loading.size());
  double g = 1.0;
  for (std::size_t j = 0; j < draws; ++j) {
    double failing = 1.0, surviving = 1.0;
    for (const auto& [id, p] : models.components()) {
      const auto& l = sample.trace(id)->loading;
      if (j >= l.size()) continue;
      const auto fs = sample.failure_stage(id);
      if (fs && static_cast<std::size_t>(*fs) == j) failing *= p.probability(l[j]);
      else surviving *= 1.0 - p.probability(l[j]);
    }
    g *= failing * surviving;
  }
  return g;
}

double sample_probability_by_components(const CascadeSample& sample, const FailureModel& models) {
  require_full_traces(sample, models);
  double g = 1.0;
  for (const auto& [id, p] : models.components()) g *= gamma_factor(p, sample, id);
  return g;
}

}  // namespace blackout

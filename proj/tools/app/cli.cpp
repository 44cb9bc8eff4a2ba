#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "api.hpp"
#include "blackout/error.hpp"
#include "blackout/optimizer.hpp"
#include "queries.hpp"
#include "workspace.hpp"

namespace blackout::app {

namespace {

struct Options {
  std::string workspace = ".";
  bool pretty = false;
  unsigned workers = 0;

  std::string case_path;
  std::string maintainable = "transformers";
  std::string config_path;
  double rating_factor = 1.5;
  double min_limit = 10.0;

  std::size_t n = 0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  bool fresh = false;

  double y0 = 0.0;
  std::string maintain;
  double beta = 0.95;
  double eps = 0.1;
  std::string csv_path;
  std::string blob_path;

  std::string alg = "two";
  int mmax = 4;
  int mk = 8;
  bool adaptive = false;
  std::size_t n0 = 5000;
  int max_rounds = 10;

  std::string host = "127.0.0.1";
  int port = 8080;
};

Strategy parse_maintain(const std::string& text) {
  Strategy s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const int id = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      s.maintained.push_back(id);
    } catch (const std::exception&) {
      throw ValidationError("--maintain expects comma-separated integer ids, got \"" + item + "\"");
    }
  }
  return s;
}

MaintainableSelection selection_from(const std::string& text) {
  if (text == "transformers") return MaintainableSelection::transformers;
  if (text == "lines") return MaintainableSelection::lines;
  if (text == "all") return MaintainableSelection::all;
  if (text == "none") return MaintainableSelection::none;
  throw ValidationError("--maintainable must be transformers, lines, all or none");
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

std::string fmt_opt(const nlohmann::json& v, int precision = 6) {
  if (v.is_null()) return "n/a";
  if (v.is_number_float()) return fmt(v.get<double>(), precision);
  return v.dump();
}

void print_risk_pretty(const nlohmann::json& r, std::ostream& out) {
  out << "maintained        " << r["maintained"].dump() << "\n"
      << "y0                " << fmt(r["y0"].get<double>()) << " MW\n"
      << "risk              " << fmt(r["risk"].get<double>()) << " MW\n"
      << "baseline risk     " << fmt(r["baseline_risk"].get<double>()) << " MW\n"
      << "reduction         " << fmt(100.0 * r["reduction_ratio"].get<double>(), 4) << " %\n"
      << "epsilon_hat       " << fmt_opt(r["epsilon_hat"]) << "\n"
      << "interval          [" << fmt(r["interval"][0].get<double>()) << ", " << fmt(r["interval"][1].get<double>())
      << "] MW at beta " << fmt(r["beta"].get<double>()) << "\n"
      << "required n        " << fmt_opt(r["required_n"]) << " (have " << r["n"].get<std::size_t>() << ")\n";
  for (const auto& w : r["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
}

void print_sensitivity_pretty(const nlohmann::json& r, std::ostream& out) {
  out << "baseline risk " << fmt(r["baseline_risk"].get<double>()) << " MW\n";
  out << std::left << std::setw(6) << "rank" << std::setw(11) << "component" << std::setw(16) << "risk (MW)"
      << "reduction (%)\n";
  for (const auto& e : r["entries"])
    out << std::setw(6) << e["rank"].get<int>() << std::setw(11) << e["component"].get<int>() << std::setw(16)
        << fmt(e["risk"].get<double>()) << fmt(100.0 * e["reduction_ratio"].get<double>(), 4) << "\n";
  out << std::setw(17) << "mean" << std::setw(16) << fmt(r["mean"]["risk"].get<double>())
      << fmt(100.0 * r["mean"]["reduction_ratio"].get<double>(), 4) << "\n";
}

void print_optimize_pretty(const nlohmann::json& r, std::ostream& out) {
  out << "algorithm         " << r["algorithm"].get<std::string>() << "\n"
      << "strategy          " << r["strategy"].dump() << "\n"
      << "risk              " << fmt(r["risk"].get<double>()) << " MW\n"
      << "baseline risk     " << fmt(r["baseline_risk"].get<double>()) << " MW\n"
      << "reduction         " << fmt(100.0 * r["reduction_ratio"].get<double>(), 4) << " %\n"
      << "scenarios         " << r["scenarios_evaluated"] << " evaluated, " << r["scenarios_enumerated_at_budget"]
      << " at budget size\n"
      << "epsilon_hat       " << fmt_opt(r["credibility"]["epsilon_hat"]) << "\n"
      << "required n        " << fmt_opt(r["credibility"]["required_n"]) << " (have "
      << r["credibility"]["n"].get<std::size_t>() << ")\n";
  if (!r["history"].empty()) {
    out << "round  n          risk (MW)     epsilon_hat  strategy\n";
    int round = 1;
    for (const auto& h : r["history"])
      out << std::left << std::setw(7) << round++ << std::setw(11) << h["n"].get<std::size_t>() << std::setw(14)
          << fmt(h["risk"].get<double>()) << std::setw(13) << fmt_opt(h["epsilon_hat"]) << h["strategy"].dump() << "\n";
    out << (r["converged"].get<bool>() ? "converged\n" : "not converged\n");
  }
  for (const auto& w : r["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
}

void emit(const nlohmann::json& doc, bool pretty, std::ostream& out, void (*printer)(const nlohmann::json&, std::ostream&)) {
  if (pretty && printer) printer(doc, out);
  else if (pretty) out << doc.dump(2) << "\n";
  else out << doc.dump() << "\n";
}

int cmd_import(const Options& o, std::ostream& out) {
  MatpowerImportOptions imp;
  imp.maintainable = selection_from(o.maintainable);
  imp.unlimited_rating_factor = o.rating_factor;
  imp.min_flow_limit = o.min_limit;
  std::optional<EngineConfig> cfg;
  if (!o.config_path.empty()) cfg = EngineConfig::from_json(read_json_file(o.config_path));
  auto ws = Workspace::import_case(o.workspace, o.case_path, imp, cfg);
  auto doc = network_summary(ws.network());
  doc.erase("maintainable");
  doc["maintainable_components"] = ws.network().maintainable_ids();
  doc["workspace"] = ws.dir().string();
  doc["network_hash"] = ws.network_hash();
  emit(doc, o.pretty, out, nullptr);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  Workspace ws(o.workspace);
  const auto r = ws.simulate(o.n, o.seed, o.workers, o.fresh);
  nlohmann::json doc = {{"master_seed", r.master_seed},
                        {"samples_before", r.before},
                        {"samples_after", r.after},
                        {"generated", r.after - (r.fresh ? 0 : r.before)},
                        {"fresh", r.fresh},
                        {"manifest", ws.manifest()}};
  emit(doc, o.pretty, out, nullptr);
  return kExitOk;
}

int cmd_risk(const Options& o, std::ostream& out) {
  Workspace ws(o.workspace);
  const auto m = ws.matrices(o.y0);
  emit(risk_answer(m, parse_maintain(o.maintain), o.beta, o.eps), o.pretty, out, print_risk_pretty);
  return kExitOk;
}

int cmd_sensitivity(const Options& o, std::ostream& out) {
  Workspace ws(o.workspace);
  const auto m = ws.matrices(o.y0);
  const auto rep = sensitivity_report(m);
  if (!o.csv_path.empty()) {
    std::ofstream csv(o.csv_path);
    if (!csv) throw Error("cannot write " + o.csv_path);
    write_sensitivity_csv(rep, csv);
  }
  emit(to_json(rep), o.pretty, out, print_sensitivity_pretty);
  return kExitOk;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  Workspace ws(o.workspace);
  OptimizerConfig cfg;
  cfg.m_max = o.mmax;
  cfg.m_k = o.mk;
  cfg.beta = o.beta;
  cfg.eps_bar = o.eps;
  cfg.y0 = o.y0;
  cfg.n0 = o.n0;
  cfg.max_rounds = o.max_rounds;
  const Algorithm alg = algorithm_from_string(o.alg);

  if (!o.adaptive) {
    const auto m = ws.matrices(o.y0);
    emit(to_json(run_algorithm(m, alg, cfg)), o.pretty, out, print_optimize_pretty);
    return kExitOk;
  }

  const auto sim = ws.simulator();
  SampleSet set;
  if (const auto header = ws.sample_header(); header) {
    set = ws.load_current_samples();
    if (o.seed_given && set.master_seed != o.seed)
      throw ValidationError("workspace samples use master seed " + std::to_string(set.master_seed) +
                            "; --seed must match or be omitted");
  } else {
    set.network_hash = sim.network_hash();
    set.model_hash = sim.model_hash();
    set.master_seed = o.seed;
  }
  const std::size_t initial = set.count();
  const auto baseline = ws.config().failure_model(ws.network());
  const auto ids = ws.network().maintainable_ids();
  RiskMatrices current;
  auto provide = [&](std::size_t n) -> const RiskMatrices& {
    if (set.count() < n) extend_samples(sim, set, n, o.workers);
    current = build_matrices(std::span<const CascadeSample>(set.samples.data(), n), baseline, ws.config().maintenance,
                             o.y0, ids);
    return current;
  };
  const auto result = procedure_one(provide, alg, cfg);
  if (set.count() > initial) ws.store_samples(set);
  emit(to_json(result), o.pretty, out, print_optimize_pretty);
  return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  Workspace ws(o.workspace);
  const auto m = ws.matrices(o.y0);
  if (o.csv_path.empty() && o.blob_path.empty()) throw ValidationError("export needs --csv and/or --blob");
  if (!o.csv_path.empty()) {
    std::ofstream csv(o.csv_path);
    if (!csv) throw Error("cannot write " + o.csv_path);
    write_matrices_csv(m, csv);
  }
  if (!o.blob_path.empty()) save_matrices(m, o.blob_path);
  emit({{"components", m.components()}, {"n", m.n}, {"y0", m.y0}}, o.pretty, out, nullptr);
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& err) {
  Workspace ws(o.workspace);
  ApiService service(ws);
  HttpServer server(service);
  const int port = server.bind(o.host, o.port);
  err << "serving " << ws.dir().string() << " on http://" << o.host << ":" << port << "\n";
  server.listen();
  return kExitOk;
}

nlohmann::json error_doc(const char* kind, const std::string& what) { return {{"error", what}, {"kind", kind}}; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cascading-blackout risk estimation and maintenance planning", "blackout"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.add_option("-w,--workspace", o.workspace, "Workspace directory")->capture_default_str();
  app.add_flag("--pretty", o.pretty, "Human-readable output instead of JSON");
  app.add_option("--workers", o.workers, "Simulation threads (0 = all cores)")->capture_default_str();

  auto* imp = app.add_subcommand("import", "Import a MATPOWER case into the workspace");
  imp->add_option("case", o.case_path, "MATPOWER .m file")->required()->check(CLI::ExistingFile);
  imp->add_option("--maintainable", o.maintainable, "transformers, lines, all or none")->capture_default_str();
  imp->add_option("--config", o.config_path, "Engine config JSON to install")->check(CLI::ExistingFile);
  imp->add_option("--rating-factor", o.rating_factor, "Limit of unrated branches as a multiple of base flow")
      ->capture_default_str();
  imp->add_option("--min-limit", o.min_limit, "Lower bound on derived limits, MW")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Generate or extend the sample set");
  sim->add_option("--n", o.n, "Target sample count")->required();
  sim->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sim->add_flag("--fresh", o.fresh, "Discard existing samples");

  auto* risk = app.add_subcommand("risk", "Risk estimate and credibility of a strategy");
  risk->add_option("--y0", o.y0, "Shed threshold, MW")->capture_default_str();
  risk->add_option("--maintain", o.maintain, "Comma-separated maintained component ids");
  risk->add_option("--beta", o.beta, "Confidence level")->capture_default_str();
  risk->add_option("--eps", o.eps, "Target relative error")->capture_default_str();

  auto* sens = app.add_subcommand("sensitivity", "Rank single-component maintenance");
  sens->add_option("--y0", o.y0, "Shed threshold, MW")->capture_default_str();
  sens->add_option("--csv", o.csv_path, "Also write the ranking as CSV");

  auto* opt = app.add_subcommand("optimize", "Choose components to maintain under a budget");
  opt->add_option("--alg", o.alg, "enum, one or two")->capture_default_str()->check(CLI::IsMember({"enum", "one", "two"}));
  opt->add_option("--mmax", o.mmax, "Budget M_max")->capture_default_str();
  opt->add_option("--mk", o.mk, "Shortlist size of algorithm one")->capture_default_str();
  opt->add_option("--eps", o.eps, "Target relative error")->capture_default_str();
  opt->add_option("--beta", o.beta, "Confidence level")->capture_default_str();
  opt->add_option("--y0", o.y0, "Shed threshold, MW")->capture_default_str();
  opt->add_flag("--adaptive", o.adaptive, "Grow the sample set until the target error is met");
  opt->add_option("--n0", o.n0, "Initial sample count of the adaptive loop")->capture_default_str();
  opt->add_option("--max-rounds", o.max_rounds, "Round cap of the adaptive loop")->capture_default_str();
  auto* seed_opt = opt->add_option("--seed", o.seed, "Master seed when the workspace has no samples");

  auto* exp = app.add_subcommand("export", "Write the risk matrices as CSV or binary blob");
  exp->add_option("--y0", o.y0, "Shed threshold, MW")->capture_default_str();
  exp->add_option("--csv", o.csv_path, "CSV output path");
  exp->add_option("--blob", o.blob_path, "Binary output path");

  auto* srv = app.add_subcommand("serve", "Serve the read-only HTTP API");
  srv->add_option("--port", o.port, "TCP port")->capture_default_str();
  srv->add_option("--host", o.host, "Bind address")->capture_default_str();

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants them reversed
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  o.seed_given = seed_opt->count() > 0;

  try {
    if (*imp) return cmd_import(o, out);
    if (*sim) return cmd_simulate(o, out);
    if (*risk) return cmd_risk(o, out);
    if (*sens) return cmd_sensitivity(o, out);
    if (*opt) return cmd_optimize(o, out);
    if (*exp) return cmd_export(o, out);
    if (*srv) return cmd_serve(o, err);
  } catch (const RefusalError& e) {
    auto doc = error_doc("refusal", e.what());
    doc["count"] = e.count();
    err << doc.dump() << "\n";
    return kExitRefusal;
  } catch (const ParseError& e) {
    err << error_doc("parse", e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const SchemaError& e) {
    err << error_doc("schema", e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << error_doc("validation", e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << error_doc("internal", e.what()).dump() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace blackout::app

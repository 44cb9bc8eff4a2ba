#include "api.hpp"

#include <algorithm>

#include <httplib.h>

#include "blackout/error.hpp"
#include "blackout/optimizer.hpp"
#include "queries.hpp"

namespace blackout::app {

namespace {

struct NoSamples {};

struct UnknownComponent {
  int id;
  std::string what;
};

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  auto doc = nlohmann::json::parse(body);
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");
  return doc;
}

double number_or(const nlohmann::json& doc, const char* key, double fallback) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number()) throw SchemaError(std::string("$.") + key, "expected a number");
  return it->get<double>();
}

int integer_or(const nlohmann::json& doc, const char* key, int fallback) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number_integer()) throw SchemaError(std::string("$.") + key, "expected an integer");
  return it->get<int>();
}

// Names the first unknown or repeated id so clients can point at it.
void check_ids(const RiskMatrices& m, const Strategy& s) {
  std::vector<int> seen;
  for (int id : s.maintained) {
    if (!std::binary_search(m.component_ids.begin(), m.component_ids.end(), id))
      throw UnknownComponent{id, "unknown component id"};
    if (std::find(seen.begin(), seen.end(), id) != seen.end()) throw UnknownComponent{id, "component id listed twice"};
    seen.push_back(id);
  }
}

}  // namespace

ApiService::ApiService(Workspace& ws) : network_(network_summary(ws.network())), manifest_(ws.manifest()) {
  if (ws.has_samples()) matrices_ = ws.matrices(0.0, false);
}

ApiService::ApiService(nlohmann::json network_summary, nlohmann::json manifest, std::optional<RiskMatrices> matrices)
    : network_(std::move(network_summary)), manifest_(std::move(manifest)), matrices_(std::move(matrices)) {}

const RiskMatrices& ApiService::require_matrices() const {
  if (!matrices_ || matrices_->n == 0) throw NoSamples{};
  return *matrices_;
}

template <typename Fn>
ApiResponse ApiService::guarded(Fn&& fn) const {
  try {
    return {200, fn()};
  } catch (const NoSamples&) {
    return {409, {{"error", "workspace has no samples; run simulate first"}}};
  } catch (const UnknownComponent& e) {
    return {422, {{"error", e.what}, {"id", e.id}}};
  } catch (const RefusalError& e) {
    return {422, {{"error", e.what()}, {"count", e.count()}}};
  } catch (const nlohmann::json::parse_error& e) {
    return {400, {{"error", std::string("malformed JSON: ") + e.what()}}};
  } catch (const SchemaError& e) {
    return {422, {{"error", e.what()}, {"path", e.path()}}};
  } catch (const ValidationError& e) {
    return {422, {{"error", e.what()}}};
  } catch (const std::exception& e) {
    return {500, {{"error", e.what()}}};
  }
}

ApiResponse ApiService::get_network() const {
  return guarded([&] { return network_; });
}

ApiResponse ApiService::get_stats(const std::map<std::string, std::string>& query) const {
  return guarded([&] {
    const auto& m = require_matrices();
    double y0 = 0.0;
    if (const auto it = query.find("y0"); it != query.end()) {
      try {
        y0 = std::stod(it->second);
      } catch (const std::exception&) {
        throw SchemaError("?y0", "expected a number");
      }
    }
    return stats_answer(m.at_threshold(y0), manifest_);
  });
}

ApiResponse ApiService::post_risk(const std::string& body) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    const auto& m = require_matrices();
    const Strategy s = strategy_from_json(doc.value("maintained", nlohmann::json::array()), "$.maintained");
    check_ids(m, s);
    const double y0 = number_or(doc, "y0", 0.0);
    return risk_answer(m.at_threshold(y0), s, number_or(doc, "beta", 0.95), number_or(doc, "eps_bar", 0.1));
  });
}

ApiResponse ApiService::post_sensitivity(const std::string& body) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    const auto& m = require_matrices();
    return to_json(sensitivity_report(m.at_threshold(number_or(doc, "y0", 0.0))));
  });
}

ApiResponse ApiService::post_optimize(const std::string& body) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    const auto& m = require_matrices();
    OptimizerConfig cfg;
    cfg.m_max = integer_or(doc, "m_max", cfg.m_max);
    cfg.m_k = integer_or(doc, "m_k", std::max(cfg.m_k, cfg.m_max));
    cfg.y0 = number_or(doc, "y0", cfg.y0);
    cfg.beta = number_or(doc, "beta", cfg.beta);
    cfg.eps_bar = number_or(doc, "eps_bar", cfg.eps_bar);
    const auto alg_it = doc.find("alg");
    if (alg_it != doc.end() && !alg_it->is_string()) throw SchemaError("$.alg", "expected \"enum\", \"one\" or \"two\"");
    const Algorithm alg = algorithm_from_string(alg_it == doc.end() ? "two" : alg_it->get<std::string>());
    return to_json(run_algorithm(m.at_threshold(cfg.y0), alg, cfg));
  });
}

ApiResponse ApiService::handle(const std::string& method, const std::string& path, const std::string& body,
                               const std::map<std::string, std::string>& query) const {
  if (method == "GET" && path == "/api/network") return get_network();
  if (method == "GET" && path == "/api/stats") return get_stats(query);
  if (method == "POST" && path == "/api/risk") return post_risk(body);
  if (method == "POST" && path == "/api/sensitivity") return post_sensitivity(body);
  if (method == "POST" && path == "/api/optimize") return post_optimize(body);
  return {404, {{"error", "no route for " + method + " " + path}}};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const ApiService& service) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get("/api/network", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_network());
  });
  server.Get("/api/stats", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    reply(res, service.get_stats(q));
  });
  server.Post("/api/risk", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_risk(req.body));
  });
  server.Post("/api/sensitivity", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_sensitivity(req.body));
  });
  server.Post("/api/optimize", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_optimize(req.body));
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace blackout::app

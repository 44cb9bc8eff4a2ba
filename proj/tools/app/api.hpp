#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "blackout/risk.hpp"
#include "workspace.hpp"

namespace blackout::app {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Read-only query service over one workspace. Everything is loaded at
/// construction; requests never touch the workspace files.
class ApiService {
 public:
  explicit ApiService(Workspace& ws);
  /// From already loaded parts; `matrices` must be at y0 = 0.
  ApiService(nlohmann::json network_summary, nlohmann::json manifest, std::optional<RiskMatrices> matrices);

  ApiResponse get_network() const;
  ApiResponse get_stats(const std::map<std::string, std::string>& query) const;
  ApiResponse post_risk(const std::string& body) const;
  ApiResponse post_sensitivity(const std::string& body) const;
  ApiResponse post_optimize(const std::string& body) const;

  /// Dispatches by method and path; 404 for unknown routes.
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& query = {}) const;

 private:
  template <typename Fn>
  ApiResponse guarded(Fn&& fn) const;
  const RiskMatrices& require_matrices() const;

  nlohmann::json network_;
  nlohmann::json manifest_;
  std::optional<RiskMatrices> matrices_;  // at y0 = 0
};

/// HTTP front end of an ApiService.
class HttpServer {
 public:
  explicit HttpServer(const ApiService& service);
  ~HttpServer();

  /// Binds host:port; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace blackout::app

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "equivar/equivariance.hpp"
#include "equivar/scenario.hpp"

namespace equivar::service {

struct ApiConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  // Built UI served at "/" when set.
  std::string static_dir;
  double session_ttl_seconds = 3600.0;
  // Append-only JSON-lines session log; replayed on startup when present.
  std::string persist_path;
  std::size_t verify_workers = 2;
  // Verifications still running after this long answer 202 with a poll URL.
  std::chrono::milliseconds async_after{100};

  // Throws InvalidArgument.
  void validate() const;
};

// EQUIVAR_PORT when set to a valid port, otherwise `fallback`. Throws
// InvalidArgument on a malformed value.
int port_from_env(int fallback);

// One verification run. Shared by POST /api/verify and the CLI so that both
// print the same bytes.
struct VerifyRequest {
  std::string scenario;
  // "brute", "ci", "markov", "region" or "surrogate".
  std::string mode = "brute";
  ActionFamily family = ActionFamily::Both;
  std::size_t max_compound = 1;
  NeighborhoodMethod method = NeighborhoodMethod::Auto;
  std::optional<std::vector<nlohmann::json>> region;
  double tolerance = kDefaultEquivarianceTolerance;
};

// Throws ParseError.
VerifyRequest verify_request_from_json(const nlohmann::json& j);
// The report as JSON. Systems past the enumeration cap get an estimate
// instead: {"mode", "estimated": true, "holds": null, "cost", "reason"}.
// Throws UnknownScenario, ParseError, ValidationError.
nlohmann::json execute_verify(const VerifyRequest& request);
nlohmann::json execute_verify(const VerifyRequest& request, const Scenario& scenario);

// JSON Schemas of the request bodies, served at GET /api/schema.
nlohmann::json api_schema();

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using Clock = std::function<std::chrono::steady_clock::time_point()>;

// Transport-independent API. `target` is the request path with an optional
// query string. Safe to call from many threads.
class Service {
 public:
  explicit Service(ApiConfig config = {}, Clock clock = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(std::string_view method, std::string_view target, std::string_view body);

  // Drops sessions idle longer than the TTL; returns how many.
  std::size_t evict_expired();
  std::size_t session_count() const;
  const ApiConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving HTTP until the process is stopped. Returns nonzero if the
// socket could not be bound.
int serve(Service& service);

}  // namespace equivar::service

#include "equivar/service.hpp"

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "equivar/nir/checkpoint.hpp"
#include "equivar/report_json.hpp"
#include "equivar/turing.hpp"

namespace equivar::service {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxQueuedJobs = 64;
constexpr std::size_t kMaxRememberedJobs = 256;

template <typename T>
T field_of(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("/") + key, 0, e.what());
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, const std::string& at = "") {
  if (!j.is_object()) throw ParseError(at, 0, "expected an object");
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError(at + "/" + key, 0, "unknown field");
  }
}

NeighborhoodMethod parse_method(const std::string& text) {
  if (text == "auto") return NeighborhoodMethod::Auto;
  if (text == "exact") return NeighborhoodMethod::Exact;
  if (text == "structural") return NeighborhoodMethod::Structural;
  throw ParseError("/method", 0, "expected \"auto\", \"exact\" or \"structural\"");
}

json estimate(const std::string& mode, double cost, const std::string& reason) {
  return {{"mode", mode}, {"estimated", true}, {"holds", nullptr}, {"cost", cost}, {"reason", reason}};
}

Scenario resolve_builtin(std::string_view name) {
  constexpr std::string_view prefix = "builtin:";
  if (name.starts_with(prefix)) name.remove_prefix(prefix.size());
  return builtin(name);
}

json error_body(std::string_view kind, const std::string& message, const std::string* field = nullptr) {
  json j{{"error", kind}, {"message", message}};
  if (field != nullptr) j["field"] = *field;
  return j;
}

Response reply(int status, const json& body) { return Response{status, body.dump(), "application/json"}; }

Response error(int status, std::string_view kind, const std::string& message) {
  return reply(status, error_body(kind, message));
}

// Maps library exceptions onto HTTP statuses. Must be called from a catch block.
Response current_error() {
  try {
    throw;
  } catch (const ParseError& e) {
    json body = error_body("parse_error", e.what(), &e.field());
    if (e.line() != 0) body["line"] = e.line();
    return reply(400, body);
  } catch (const ValidationError& e) {
    json body = error_body("validation_error", e.what());
    body["diagnostics"] = json::array();
    for (const Diagnostic& d : e.diagnostics()) body["diagnostics"].push_back({{"field", d.field}, {"message", d.message}});
    return reply(422, body);
  } catch (const json::exception& e) {
    return error(400, "parse_error", e.what());
  } catch (const UnknownScenario& e) {
    return error(404, "unknown_scenario", e.what());
  } catch (const SessionClosed& e) {
    return error(409, "session_closed", e.what());
  } catch (const AmbiguousTranslation& e) {
    return error(422, "ambiguous_translation", e.what());
  } catch (const ZeroProbabilityEvidence& e) {
    return error(422, "zero_probability_evidence", e.what());
  } catch (const StateSpaceTooLarge& e) {
    return error(422, "state_space_too_large", e.what());
  } catch (const Divergence& e) {
    return error(422, "divergence", e.what());
  } catch (const InvalidAction& e) {
    return error(400, "invalid_action", e.what());
  } catch (const UnknownVariable& e) {
    return error(400, "unknown_variable", e.what());
  } catch (const UnknownValue& e) {
    return error(400, "unknown_value", e.what());
  } catch (const DimensionMismatch& e) {
    return error(400, "dimension_mismatch", e.what());
  } catch (const IndexOutOfRange& e) {
    return error(400, "index_out_of_range", e.what());
  } catch (const InvalidArgument& e) {
    return error(400, "invalid_argument", e.what());
  } catch (const Error& e) {
    return error(500, "internal", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

struct Target {
  std::vector<std::string> segments;
  std::map<std::string, std::string> params;
};

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      unsigned v = 0;
      const auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      if (ec == std::errc() && p == s.data() + i + 3) {
        out.push_back(static_cast<char>(v));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i] == '+' ? ' ' : s[i]);
  }
  return out;
}

Target parse_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  std::string_view path = target.substr(0, q);
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) t.segments.push_back(percent_decode(path.substr(start, end - start)));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (q != std::string_view::npos) {
    std::string_view query = target.substr(q + 1);
    while (!query.empty()) {
      const auto amp = query.find('&');
      const std::string_view pair = query.substr(0, amp);
      const auto eq = pair.find('=');
      if (!pair.empty()) {
        t.params[percent_decode(pair.substr(0, eq))] =
            eq == std::string_view::npos ? "" : percent_decode(pair.substr(eq + 1));
      }
      if (amp == std::string_view::npos) break;
      query.remove_prefix(amp + 1);
    }
  }
  return t;
}

template <typename T>
T query_param(const Target& t, const std::string& key, T fallback) {
  const auto it = t.params.find(key);
  if (it == t.params.end()) return fallback;
  const std::string& s = it->second;
  if constexpr (std::is_same_v<T, double>) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("?" + key, 0, "expected a number");
    return v;
  } else {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("?" + key, 0, "expected a non-negative integer");
    return v;
  }
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < body.size(); ++i) line += body[i] == '\n' ? 1 : 0;
    throw ParseError("", line, e.what());
  }
}

std::string content_type_of(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"}, {".svg", "image/svg+xml"},
      {".png", "image/png"},                 {".ico", "image/x-icon"},      {".txt", "text/plain"},
      {".map", "application/json"},          {".woff2", "font/woff2"}};
  const auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

class WorkerPool {
 public:
  explicit WorkerPool(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) threads_.emplace_back([this] { run(); });
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  // False when the queue is full.
  bool submit(std::function<void()> task) {
    {
      std::lock_guard lock(mu_);
      if (queue_.size() >= kMaxQueuedJobs) return false;
      queue_.push_back(std::move(task));
    }
    cv_.notify_one();
    return true;
  }

 private:
  void run() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        task = std::move(queue_.front());
        queue_.pop_front();
      }
      task();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

struct SessionEntry {
  SessionEntry(turing::Session s, std::chrono::steady_clock::time_point t) : session(std::move(s)), last_used(t) {}
  std::mutex mu;
  turing::Session session;
  std::chrono::steady_clock::time_point last_used;
};

}  // namespace

void ApiConfig::validate() const {
  if (port < 0 || port > 65535) throw InvalidArgument("port must be in 0..65535");
  if (!(session_ttl_seconds > 0.0)) throw InvalidArgument("session TTL must be positive");
  if (verify_workers == 0) throw InvalidArgument("at least one verification worker is needed");
  if (async_after.count() < 0) throw InvalidArgument("async threshold must be non-negative");
}

int port_from_env(int fallback) {
  const char* raw = std::getenv("EQUIVAR_PORT");
  if (raw == nullptr || *raw == '\0') return fallback;
  const std::string_view s(raw);
  int port = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
  if (ec != std::errc() || p != s.data() + s.size() || port < 0 || port > 65535) {
    throw InvalidArgument("EQUIVAR_PORT='" + std::string(s) + "' is not a port number");
  }
  return port;
}

VerifyRequest verify_request_from_json(const json& j) {
  reject_unknown_keys(j, {"scenario", "mode", "family", "max_compound", "method", "region", "tolerance"});
  VerifyRequest r;
  r.scenario = field_of<std::string>(j, "scenario", "");
  if (r.scenario.empty()) throw ParseError("/scenario", 0, "a scenario name is required");
  r.mode = field_of<std::string>(j, "mode", r.mode);
  static const std::vector<std::string> modes{"brute", "ci", "markov", "region", "surrogate"};
  if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) {
    throw ParseError("/mode", 0, "expected one of brute, ci, markov, region, surrogate");
  }
  try {
    r.family = parse_action_family(field_of<std::string>(j, "family", "both"));
  } catch (const InvalidArgument& e) {
    throw ParseError("/family", 0, e.what());
  }
  r.max_compound = field_of<std::size_t>(j, "max_compound", r.max_compound);
  if (r.max_compound == 0) throw ParseError("/max_compound", 0, "must be at least 1");
  r.method = parse_method(field_of<std::string>(j, "method", "auto"));
  if (j.contains("region") && !j["region"].is_null()) {
    if (!j["region"].is_array()) throw ParseError("/region", 0, "expected an array of actions");
    r.region = j["region"].get<std::vector<json>>();
  }
  r.tolerance = field_of<double>(j, "tolerance", r.tolerance);
  if (!(r.tolerance >= 0.0)) throw ParseError("/tolerance", 0, "must be non-negative");
  return r;
}

json execute_verify(const VerifyRequest& request) { return execute_verify(request, resolve_builtin(request.scenario)); }

json execute_verify(const VerifyRequest& req, const Scenario& s) {
  VerifyOptions options;
  options.tolerance = req.tolerance;
  if (req.mode == "brute") {
    try {
      return to_json(verify_brute(s.machine, s.human, s.translation, req.family, req.max_compound, options));
    } catch (const StateSpaceTooLarge& e) {
      return estimate(req.mode, estimate_brute_cost(s.machine.system(), req.family, req.max_compound), e.what());
    }
  }
  if (req.mode == "markov") {
    try {
      return to_json(verify_markov_local(s.machine, s.human, s.translation, req.family, req.method, options));
    } catch (const StateSpaceTooLarge& e) {
      return estimate(req.mode, estimate_markov_cost(s.machine, s.translation, req.family), e.what());
    }
  }
  if (req.mode == "ci") return to_json(verify_ci_preservation(s.machine, s.human, s.translation, 12, options));
  if (req.mode == "region") {
    std::vector<CompoundAction> region;
    if (req.region) {
      for (std::size_t k = 0; k < req.region->size(); ++k) {
        region.push_back(action_from_json((*req.region)[k], s.machine.system(), "/region/" + std::to_string(k)));
      }
    } else {
      region = s.region;
    }
    if (region.empty()) throw ParseError("/region", 0, "scenario '" + s.name + "' declares no region; pass one");
    return to_json(verify_region(s.machine, s.human, s.translation, region, options));
  }
  if (req.mode == "surrogate") {
    if (!s.surrogate) throw ParseError("/mode", 0, "scenario '" + s.name + "' has no surrogate");
    return to_json(verify_surrogate_chain(s.machine, s.surrogate->model, s.human, s.surrogate->to_surrogate,
                                          s.surrogate->to_human, req.family, req.max_compound, options));
  }
  throw ParseError("/mode", 0, "unknown mode '" + req.mode + "'");
}

json api_schema() {
  const json action{{"type", "object"},
                    {"description", "variable name to {\"observe\"|\"do\": value label}, or an array of such"}};
  const json forecast{{"oneOf", json::array({{{"type", "string"}},
                                             {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}})}};
  json schemas;
  schemas["verify_request"] = {
      {"type", "object"},
      {"required", {"scenario"}},
      {"additionalProperties", false},
      {"properties",
       {{"scenario", {{"type", "string"}}},
        {"mode", {{"enum", {"brute", "ci", "markov", "region", "surrogate"}}, {"default", "brute"}}},
        {"family", {{"enum", {"observe", "do", "both"}}, {"default", "both"}}},
        {"max_compound", {{"type", "integer"}, {"minimum", 1}, {"default", 1}}},
        {"method", {{"enum", {"auto", "exact", "structural"}}, {"default", "auto"}}},
        {"region", {{"type", "array"}, {"items", action}}},
        {"tolerance", {{"type", "number"}, {"minimum", 0}, {"default", kDefaultEquivarianceTolerance}}}}}};
  schemas["session_create"] = {{"type", "object"},
                               {"required", {"scenario"}},
                               {"additionalProperties", false},
                               {"properties",
                                {{"scenario", {{"type", "string"}}},
                                 {"query", {{"type", "string"}}},
                                 {"seed", {{"type", "integer"}, {"minimum", 0}, {"default", 1}}}}}};
  schemas["round"] = {{"type", "object"},
                      {"required", {"action", "forecast"}},
                      {"additionalProperties", false},
                      {"properties", {{"action", action}, {"forecast", forecast}}}};
  schemas["nir_inspect"] = {
      {"type", "object"},
      {"required", {"input"}},
      {"additionalProperties", false},
      {"properties",
       {{"input", {{"type", "array"}, {"items", {{"type", "number"}}}}},
        {"edits",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"required", {"concept", "weight"}},
            {"properties", {{"concept", {{"type", {"string", "integer"}}}}, {"weight", {{"type", "number"}}}}}}}}},
        {"checkpoint", {{"type", "object"}}}}}};
  json endpoints = json::array({
      {{"method", "GET"}, {"path", "/api/scenarios"}},
      {{"method", "GET"}, {"path", "/api/scenarios/{name}"}},
      {{"method", "POST"}, {"path", "/api/verify"}, {"body", "verify_request"}},
      {{"method", "GET"}, {"path", "/api/jobs/{id}"}},
      {{"method", "POST"}, {"path", "/api/sessions"}, {"body", "session_create"}},
      {{"method", "GET"}, {"path", "/api/sessions/{id}"}},
      {{"method", "POST"}, {"path", "/api/sessions/{id}/round"}, {"body", "round"}},
      {{"method", "POST"}, {"path", "/api/sessions/{id}/close"}},
      {{"method", "GET"}, {"path", "/api/sessions/{id}/verdict"}, {"query", {"threshold", "min_rounds"}}},
      {{"method", "POST"}, {"path", "/api/nir/inspect"}, {"body", "nir_inspect"}},
      {{"method", "GET"}, {"path", "/api/schema"}},
  });
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"}, {"schemas", schemas}, {"endpoints", endpoints}};
}

struct Service::Impl {
  Impl(ApiConfig c, Clock k) : config(std::move(c)), clock(std::move(k)), pool(config.verify_workers) {}

  ApiConfig config;
  Clock clock;

  mutable std::mutex mu;  // guards everything below except the pool
  std::map<std::string, std::shared_ptr<const Scenario>> scenarios;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions;
  std::uint64_t next_session = 1;
  std::map<std::string, std::shared_future<Response>> jobs;
  std::deque<std::string> job_order;
  std::uint64_t next_job = 1;

  std::mutex persist_mu;
  std::ofstream persist;

  std::mutex nir_mu;
  std::optional<nir::NirModel> default_nir;

  WorkerPool pool;

  std::shared_ptr<const Scenario> scenario(const std::string& name) {
    std::lock_guard lock(mu);
    auto it = scenarios.find(name);
    if (it == scenarios.end()) {
      it = scenarios.emplace(name, std::make_shared<const Scenario>(resolve_builtin(name))).first;
    }
    return it->second;
  }

  void log(const json& event) {
    if (config.persist_path.empty()) return;
    std::lock_guard lock(persist_mu);
    persist << event.dump() << '\n';
    persist.flush();
  }

  std::shared_ptr<SessionEntry> find_session(const std::string& id) {
    std::lock_guard lock(mu);
    const auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void restore();
  Response create_session(const json& body);
  Response play_round(SessionEntry& entry, const json& body);
  Response verify(const json& body);
  Response job(const std::string& id);
  Response inspect(const json& body);
  Response serve_static(const Target& t);
  Response route(std::string_view method, const Target& t, std::string_view body);
};

void Service::Impl::restore() {
  std::ifstream in(config.persist_path);
  if (!in) return;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  const auto now = clock();
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    json e;
    try {
      e = json::parse(lines[n]);
    } catch (const json::parse_error& err) {
      // A crash can truncate the final line; anything earlier is corruption.
      if (n + 1 == lines.size()) break;
      throw ParseError("", n + 1, std::string("session log: ") + err.what());
    }
    try {
      const std::string kind = e.at("event").get<std::string>();
      const std::string id = e.at("id").get<std::string>();
      if (kind == "open") {
        auto sc = scenario(e.at("scenario").get<std::string>());
        turing::Session s(id, sc, e.at("query").get<std::string>(), e.at("seed").get<std::uint64_t>());
        sessions[id] = std::make_shared<SessionEntry>(std::move(s), now);
        if (id.size() > 1 && id[0] == 's') {
          std::uint64_t k = 0;
          std::from_chars(id.data() + 1, id.data() + id.size(), k);
          next_session = std::max(next_session, k + 1);
        }
        continue;
      }
      const auto it = sessions.find(id);
      if (it == sessions.end()) continue;  // evicted before the restart
      turing::Session& s = it->second->session;
      if (kind == "round") {
        const Variable& q = s.scenario().human.system()[s.query_index()];
        s.play(action_from_json(e.at("action"), s.scenario().machine.system()),
               turing::forecast_from_json(e.at("forecast"), q));
      } else if (kind == "close") {
        s.close();
      } else if (kind == "evict") {
        sessions.erase(it);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& err) {
      throw ParseError("", n + 1, std::string("session log: ") + err.what());
    }
  }
}

Response Service::Impl::create_session(const json& body) {
  reject_unknown_keys(body, {"scenario", "query", "seed"});
  const std::string name = field_of<std::string>(body, "scenario", "");
  if (name.empty()) throw ParseError("/scenario", 0, "a scenario name is required");
  auto sc = scenario(name);
  std::string query = field_of<std::string>(body, "query", sc->query.value_or(""));
  if (query.empty()) query = sc->human.system()[sc->human.size() - 1].name;
  if (!sc->human.system().find(query)) throw ParseError("/query", 0, "'" + query + "' is not a human variable");
  const auto seed = field_of<std::uint64_t>(body, "seed", 1);
  std::string id;
  std::shared_ptr<SessionEntry> entry;
  {
    std::lock_guard lock(mu);
    id = "s" + std::to_string(next_session++);
    entry = std::make_shared<SessionEntry>(turing::Session(id, sc, query, seed), clock());
    sessions[id] = entry;
  }
  log({{"event", "open"}, {"id", id}, {"scenario", name}, {"query", query}, {"seed", seed}});
  const turing::Session& s = entry->session;
  return reply(201, {{"session_id", id},
                     {"scenario", sc->name},
                     {"query", query},
                     {"query_domain", s.scenario().human.system()[s.query_index()].domain},
                     {"seed", seed}});
}

Response Service::Impl::play_round(SessionEntry& entry, const json& body) {
  reject_unknown_keys(body, {"action", "forecast"});
  if (!body.contains("action")) throw ParseError("/action", 0, "missing");
  if (!body.contains("forecast")) throw ParseError("/forecast", 0, "missing");
  std::unique_lock lock(entry.mu, std::try_to_lock);
  if (!lock.owns_lock()) return error(409, "round_in_flight", "another round is being played on this session");
  turing::Session& s = entry.session;
  const CompoundAction action = action_from_json(body["action"], s.scenario().machine.system());
  const turing::Forecast f =
      turing::forecast_from_json(body["forecast"], s.scenario().human.system()[s.query_index()]);
  const turing::RoundResult r = s.play(action, f);
  entry.last_used = clock();
  log({{"event", "round"},
       {"id", s.id()},
       {"action", action_to_json(s.rounds().back().action, s.scenario().machine.system())},
       {"forecast", body["forecast"]}});
  return reply(200, turing::round_result_to_json(s, r));
}

Response Service::Impl::verify(const json& body) {
  const VerifyRequest req = verify_request_from_json(body);
  auto sc = scenario(req.scenario);
  auto task = std::make_shared<std::packaged_task<Response()>>([req, sc] {
    try {
      return Response{200, dump(execute_verify(req, *sc)), "application/json"};
    } catch (...) {
      return current_error();
    }
  });
  std::shared_future<Response> result = task->get_future().share();
  if (!pool.submit([task] { (*task)(); })) return error(503, "busy", "too many verifications queued");
  if (result.wait_for(config.async_after) == std::future_status::ready) return result.get();
  std::string id;
  {
    std::lock_guard lock(mu);
    id = "j" + std::to_string(next_job++);
    jobs[id] = result;
    job_order.push_back(id);
    while (job_order.size() > kMaxRememberedJobs) {
      jobs.erase(job_order.front());
      job_order.pop_front();
    }
  }
  return reply(202, {{"job_id", id}, {"status", "running"}, {"poll", "/api/jobs/" + id}});
}

Response Service::Impl::job(const std::string& id) {
  std::shared_future<Response> f;
  {
    std::lock_guard lock(mu);
    const auto it = jobs.find(id);
    if (it == jobs.end()) return error(404, "unknown_job", "no job '" + id + "'");
    f = it->second;
  }
  if (f.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return reply(202, {{"job_id", id}, {"status", "running"}, {"poll", "/api/jobs/" + id}});
  }
  return f.get();
}

Response Service::Impl::inspect(const json& body) {
  reject_unknown_keys(body, {"input", "edits", "checkpoint"});
  std::optional<nir::NirModel> from_checkpoint;
  if (body.contains("checkpoint")) from_checkpoint = nir::checkpoint_from_json(body["checkpoint"]).model;
  const nir::NirModel* model = nullptr;
  if (from_checkpoint) {
    model = &*from_checkpoint;
  } else {
    std::lock_guard lock(nir_mu);
    if (!default_nir) {
      const nir::DatasetRule rule = *scenario("braking")->nir;
      const auto [train_set, unused] = nir::split(nir::generate(rule), rule.train_fraction);
      (void)unused;
      default_nir = nir::train(train_set, rule.concept_names(), nir::TrainConfig{}).model;
    }
    model = &*default_nir;
  }
  if (!body.contains("input")) throw ParseError("/input", 0, "missing");
  const auto input = field_of<std::vector<double>>(body, "input", {});
  if (input.size() != model->input_dim()) {
    throw ParseError("/input", 0,
                     "expected " + std::to_string(model->input_dim()) + " numbers, got " + std::to_string(input.size()));
  }
  const std::vector<std::string>& names = model->concept_names();
  std::vector<std::pair<std::size_t, double>> edits;
  if (body.contains("edits")) {
    if (!body["edits"].is_array()) throw ParseError("/edits", 0, "expected an array");
    for (std::size_t k = 0; k < body["edits"].size(); ++k) {
      const std::string at = "/edits/" + std::to_string(k);
      const json& e = body["edits"][k];
      if (!e.is_object() || !e.contains("concept") || !e.contains("weight") || !e["weight"].is_number()) {
        throw ParseError(at, 0, "an edit needs a concept and a numeric weight");
      }
      std::size_t index = 0;
      if (e["concept"].is_number_unsigned()) {
        index = e["concept"].get<std::size_t>();
        if (index > names.size()) throw ParseError(at + "/concept", 0, "index out of range");
      } else if (e["concept"].is_string()) {
        const std::string name = e["concept"].get<std::string>();
        const auto it = std::find(names.begin(), names.end(), name);
        if (name == "bias") {
          index = names.size();
        } else if (it == names.end()) {
          throw ParseError(at + "/concept", 0, "unknown concept '" + name + "'");
        } else {
          index = static_cast<std::size_t>(it - names.begin());
        }
      } else {
        throw ParseError(at + "/concept", 0, "expected a concept name or index");
      }
      edits.emplace_back(index, e["weight"].get<double>());
    }
  }
  const auto describe = [&](const nir::NirOutput& o) {
    json concepts = json::array();
    const Eigen::VectorXd contrib = o.contributions();
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      concepts.push_back({{"name", names[j]}, {"value", o.concepts(i)}, {"weight", o.weights(i)},
                          {"contribution", contrib(i)}});
    }
    return json{{"concepts", concepts}, {"bias", o.bias}, {"y_hat", o.y_hat}, {"decision", o.y_hat > 0.5 ? 1 : 0}};
  };
  json out = describe(model->forward(std::span<const double>(input)));
  out["model"] = from_checkpoint ? "checkpoint" : "default";
  out["edited"] = edits.empty() ? json(nullptr) : describe(nir::functional_intervention(*model, edits, input));
  return reply(200, out);
}

Response Service::Impl::serve_static(const Target& t) {
  if (config.static_dir.empty()) return error(404, "not_found", "no such route");
  std::filesystem::path p(config.static_dir);
  for (const std::string& seg : t.segments) {
    if (seg == ".." || seg == "." || seg.find('\\') != std::string::npos || seg.find('/') != std::string::npos) {
      return error(404, "not_found", "no such file");
    }
    p /= seg;
  }
  if (t.segments.empty() || std::filesystem::is_directory(p)) p /= "index.html";
  std::ifstream in(p, std::ios::binary);
  if (!in) return error(404, "not_found", "no such file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Response{200, buf.str(), content_type_of(p)};
}

Response Service::Impl::route(std::string_view method, const Target& t, std::string_view raw) {
  const auto& seg = t.segments;
  const bool get = method == "GET";
  const bool post = method == "POST";
  const auto wrong_method = [&] { return error(405, "method_not_allowed", std::string(method) + " not allowed here"); };

  if (seg.empty() || seg[0] != "api") {
    if (!get && method != "HEAD") return wrong_method();
    return serve_static(t);
  }
  const std::size_t n = seg.size();
  if (n == 2 && seg[1] == "schema") return get ? reply(200, api_schema()) : wrong_method();
  if (n == 2 && seg[1] == "scenarios") {
    if (!get) return wrong_method();
    json list = json::array();
    for (const std::string& name : builtin_names()) list.push_back(scenario_summary(*scenario(name)));
    return reply(200, {{"scenarios", list}});
  }
  if (n == 3 && seg[1] == "scenarios") {
    if (!get) return wrong_method();
    auto sc = scenario(seg[2]);
    json out = scenario_summary(*sc);
    out["definition"] = scenario_to_json(*sc);
    return reply(200, out);
  }
  if (n == 2 && seg[1] == "verify") return post ? verify(parse_body(raw)) : wrong_method();
  if (n == 3 && seg[1] == "jobs") return get ? job(seg[2]) : wrong_method();
  if (n == 3 && seg[1] == "nir" && seg[2] == "inspect") return post ? inspect(parse_body(raw)) : wrong_method();
  if (n == 2 && seg[1] == "sessions") return post ? create_session(parse_body(raw)) : wrong_method();
  if (n >= 3 && n <= 4 && seg[1] == "sessions") {
    const std::string& id = seg[2];
    const std::string action = n == 4 ? seg[3] : "";
    if (action != "" && action != "round" && action != "close" && action != "verdict") {
      return error(404, "not_found", "no such route");
    }
    if ((action == "" || action == "verdict") ? !get : !post) return wrong_method();
    auto entry = find_session(id);
    if (!entry) return error(404, "unknown_session", "no session '" + id + "'");
    if (action == "round") return play_round(*entry, parse_body(raw));
    std::lock_guard lock(entry->mu);
    entry->last_used = clock();
    turing::Session& s = entry->session;
    if (action == "") return reply(200, turing::transcript_to_json(s));
    if (action == "verdict") {
      const double threshold = query_param<double>(t, "threshold", turing::kDefaultThreshold);
      const auto min_rounds = query_param<std::size_t>(t, "min_rounds", turing::kDefaultMinRounds);
      return reply(200, turing::to_json(s.verdict(threshold, min_rounds)));
    }
    if (s.status() == turing::Status::Closed) return error(409, "session_closed", "session " + id + " is closed");
    s.close();
    log({{"event", "close"}, {"id", id}});
    return reply(200, turing::transcript_to_json(s));
  }
  return error(404, "not_found", "no such route");
}

Service::Service(ApiConfig config, Clock clock) {
  config.validate();
  if (!clock) clock = [] { return std::chrono::steady_clock::now(); };
  impl_ = std::make_unique<Impl>(std::move(config), std::move(clock));
  if (!impl_->config.persist_path.empty()) {
    impl_->restore();
    impl_->persist.open(impl_->config.persist_path, std::ios::app);
    if (!impl_->persist) throw Error("cannot open session log '" + impl_->config.persist_path + "'");
  }
}

Service::~Service() = default;

Response Service::handle(std::string_view method, std::string_view target, std::string_view body) {
  evict_expired();
  try {
    return impl_->route(method, parse_target(target), body);
  } catch (...) {
    return current_error();
  }
}

std::size_t Service::evict_expired() {
  const auto now = impl_->clock();
  const auto ttl = std::chrono::duration<double>(impl_->config.session_ttl_seconds);
  std::vector<std::string> gone;
  {
    std::lock_guard lock(impl_->mu);
    for (auto it = impl_->sessions.begin(); it != impl_->sessions.end();) {
      // A session mid-round is in use, never idle.
      std::unique_lock busy(it->second->mu, std::try_to_lock);
      if (busy.owns_lock() && now - it->second->last_used > ttl) {
        gone.push_back(it->first);
        busy.unlock();
        it = impl_->sessions.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const std::string& id : gone) impl_->log({{"event", "evict"}, {"id", id}});
  return gone.size();
}

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->sessions.size();
}

const ApiConfig& Service::config() const { return impl_->config; }

}  // namespace equivar::service

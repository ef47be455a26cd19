#include "ftrs/service.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "ftrs/fixtures.hpp"
#include "ftrs/metrics.hpp"
#include "httplib.h"

namespace ftrs {

namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Response ok(json data, int status = 200) { return {status, ok_envelope(std::move(data))}; }

Response fail(int status, const std::string& code, const std::string& message, const std::string& path = {}) {
  return {status, error_envelope(code, message, path)};
}

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownRecord: return 404;
    case ErrorCode::StaleVersion: return 409;
    case ErrorCode::StoreUnavailable: return 503;
    default: return 422;
  }
}

Response fail(const Error& e) { return fail(status_for(e.code()), std::string(to_string(e.code())), e.what()); }

std::optional<std::string> query_value(const std::multimap<std::string, std::string>& q, const std::string& key) {
  const auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

json submit_data(const TicketRecord& r, int version) {
  std::optional<std::string> divert;
  for (const auto& f : r.flags)
    if (f.rfind("diverted:", 0) == 0) divert = f.substr(9);
  return json{{"id", r.id},
              {"version", version},
              {"status", r.audit_state == AuditState::Pending ? "needs_audit" : "accepted"},
              {"divert_stage", divert ? json(*divert) : json(nullptr)},
              {"record", r}};
}

}  // namespace

json ok_envelope(json data) { return json{{"status", "ok"}, {"data", std::move(data)}}; }

json error_envelope(const std::string& code, const std::string& message, const std::string& path) {
  json err{{"code", code}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  return json{{"status", "error"}, {"error", err}};
}

std::string encode_cursor(std::int64_t ts, const std::string& id) {
  const std::string raw = std::to_string(ts) + "|" + id;
  std::string out;
  char buf[3];
  for (unsigned char c : raw) {
    std::snprintf(buf, sizeof buf, "%02x", c);
    out += buf;
  }
  return out;
}

std::optional<std::pair<std::int64_t, std::string>> decode_cursor(const std::string& cursor) {
  if (cursor.size() % 2 != 0) return std::nullopt;
  std::string raw;
  for (std::size_t i = 0; i < cursor.size(); i += 2) {
    const std::string byte = cursor.substr(i, 2);
    if (byte.find_first_not_of("0123456789abcdef") != std::string::npos) return std::nullopt;
    raw.push_back(static_cast<char>(std::stoi(byte, nullptr, 16)));
  }
  const auto bar = raw.find('|');
  if (bar == std::string::npos) return std::nullopt;
  const auto ts = parse_int(raw.substr(0, bar));
  if (!ts) return std::nullopt;
  return std::pair{*ts, raw.substr(bar + 1)};
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  ServiceConfig cfg;
  if (!path.empty()) {
    const json j = read_json_file(path);
    const auto base = path.parent_path();
    cfg.host = j.value("host", cfg.host);
    cfg.port = j.value("port", cfg.port);
    cfg.snapshot_every = j.value("snapshot_every", cfg.snapshot_every);
    if (j.contains("pipeline_config")) cfg.pipeline_config = base / j["pipeline_config"].get<std::string>();
    if (j.contains("warehouse_dir")) cfg.warehouse_dir = base / j["warehouse_dir"].get<std::string>();
  }
  if (const char* h = std::getenv("FTRS_HOST"); h && *h) cfg.host = h;
  if (const char* p = std::getenv("FTRS_PORT"); p && *p) {
    const auto port = parse_int(p);
    if (!port || *port <= 0 || *port > 65535) throw Error(ErrorCode::InvalidConfig, "FTRS_PORT is not a port number");
    cfg.port = static_cast<int>(*port);
  }
  if (cfg.port <= 0 || cfg.port > 65535) throw Error(ErrorCode::InvalidConfig, "port out of range");
  return cfg;
}

Service::Service(LoadedConfig cfg, Warehouse::Options store) : cfg_(std::move(cfg)) {
  validate(cfg_.pipeline);
  backends_ = make_backends(cfg_.backends, cfg_.pipeline);
  store.registry = cfg_.pipeline.registry;
  store_ = std::make_unique<Warehouse>(std::move(store));
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::multimap<std::string, std::string>& query, const std::string& body) {
  try {
    static const std::string tickets = "/v1/tickets", audit = "/v1/audit/";
    if (path == tickets) {
      if (method == "POST") return submit(body);
    } else if (path.rfind(tickets + "/", 0) == 0 && path.size() > tickets.size() + 1) {
      if (method == "GET") return get_ticket(path.substr(tickets.size() + 1));
    } else if (path == "/v1/audit/queue") {
      if (method == "GET") return queue(query);
    } else if (path.rfind(audit, 0) == 0 && path.size() > audit.size()) {
      if (method == "POST") return this->audit(path.substr(audit.size()), body);
    } else if (path == "/v1/warehouse/stats") {
      if (method == "GET") return stats(query);
    } else if (path == "/v1/warehouse/push-sets") {
      if (method == "GET") return push_sets();
    } else if (path == "/v1/metrics") {
      if (method == "GET") return metrics_get();
      if (method == "POST") return metrics_post(body);
    } else {
      return fail(404, "NotFound", "no route for " + path);
    }
    return fail(405, "MethodNotAllowed", method + " is not supported on " + path);
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(500, "Internal", e.what());
  }
}

Response Service::submit(const std::string& body) {
  ++submitted_;
  RawTicketImage raw;
  try {
    raw = fixture_from_json(json::parse(body));
  } catch (const SchemaError& e) {
    ++rejected_;
    return fail(422, "SchemaViolation", e.what(), e.path());
  } catch (const json::exception& e) {
    ++rejected_;
    return fail(422, "SchemaViolation", std::string("body is not valid JSON: ") + e.what(), "");
  }
  std::lock_guard lock(submit_mu_);
  const std::string digest = fixture_digest(raw);
  if (const auto existing = store_->latest(raw.id)) {
    if (existing->record.source_digest != digest) {
      ++rejected_;
      return fail(409, "DuplicateId", "ticket '" + raw.id + "' exists with different content");
    }
    return ok(submit_data(existing->record, existing->version), 201);
  }
  ProcessOutcome o;
  try {
    o = process_ticket(raw, cfg_.pipeline, backends_, *store_);
  } catch (const Error& e) {
    ++rejected_;
    return fail(e);
  }
  ++(o.status == Status::Accepted ? accepted_ : diverted_);
  return ok(submit_data(o.record, o.version), 201);
}

Response Service::get_ticket(const std::string& id) {
  const auto rec = store_->latest(id);
  if (!rec) return fail(404, "UnknownRecord", "no record '" + id + "'");
  return ok(to_json(*rec));
}

Response Service::queue(const std::multimap<std::string, std::string>& query) {
  std::size_t limit = 50;
  if (const auto l = query_value(query, "limit")) {
    const auto v = parse_int(*l);
    if (!v || *v < 1 || *v > 500) return fail(422, "InvalidArgument", "limit must be an integer in [1, 500]", "limit");
    limit = static_cast<std::size_t>(*v);
  }
  std::optional<std::pair<std::int64_t, std::string>> after;
  if (const auto c = query_value(query, "cursor"); c && !c->empty()) {
    after = decode_cursor(*c);
    if (!after) return fail(422, "InvalidArgument", "cursor is not valid", "cursor");
  }
  const QueuePage page = store_->audit_queue(limit, after);
  json items = json::array();
  for (const auto& r : page.items) items.push_back(to_json(r));
  return ok({{"items", items},
             {"next_cursor", page.next ? json(encode_cursor(page.next->first, page.next->second)) : json(nullptr)}});
}

Response Service::audit(const std::string& id, const std::string& body) {
  AuditDecision d;
  try {
    const json j = json::parse(body);
    if (!j.is_object()) return fail(422, "SchemaViolation", "decision must be an object", "");
    if (!j.contains("version") || !j["version"].is_number_integer())
      return fail(422, "SchemaViolation", "version is required", "/version");
    if (!j.contains("verdict") || !j["verdict"].is_string())
      return fail(422, "SchemaViolation", "verdict is required", "/verdict");
    d = j.get<AuditDecision>();
  } catch (const Error& e) {
    return fail(422, "SchemaViolation", e.what(), "");
  } catch (const json::exception& e) {
    return fail(422, "SchemaViolation", e.what(), "");
  }
  const WarehouseRecord updated = store_->audit_decide(id, d);
  ++audits_;
  return ok(to_json(updated));
}

Response Service::stats(const std::multimap<std::string, std::string>& query) {
  TimeWindow w;
  for (const char* key : {"from", "to"}) {
    if (const auto v = query_value(query, key)) {
      const auto n = parse_int(*v);
      if (!n) return fail(422, "InvalidArgument", std::string(key) + " must be an integer timestamp (ms)", key);
      (std::string(key) == "from" ? w.from : w.to) = *n;
    }
  }
  json data = to_json(store_->stats_report(w, cfg_.pipeline.tau_class, cfg_.pipeline.scarce_min_count));
  data["snapshot_ts"] = now_ms();
  return ok(data);
}

Response Service::push_sets() {
  const PushSets sets = store_->select_push_sets(cfg_.pipeline.tau_class, cfg_.pipeline.scarce_min_count);
  return ok({{"error_prone", sets.error_prone},
             {"unfamiliar", sets.unfamiliar},
             {"scarce", sets.scarce},
             {"snapshot_ts", now_ms()}});
}

Response Service::metrics_get() {
  return ok({{"tickets_submitted", submitted_.load()},
             {"accepted", accepted_.load()},
             {"needs_audit", diverted_.load()},
             {"rejected", rejected_.load()},
             {"audits", audits_.load()},
             {"records", store_->record_count()},
             {"versions", store_->version_count()},
             {"snapshot_ts", now_ms()}});
}

Response Service::metrics_post(const std::string& body) {
  std::vector<SampleEval> samples;
  try {
    json j = json::parse(body);
    if (j.is_object() && j.contains("samples")) j = j["samples"];
    if (!j.is_array()) return fail(422, "SchemaViolation", "expected a list of samples", "/samples");
    for (std::size_t i = 0; i < j.size(); ++i) {
      try {
        samples.push_back(j[i].get<SampleEval>());
      } catch (const std::exception& e) {
        return fail(422, "SchemaViolation", e.what(), "/samples/" + std::to_string(i));
      }
    }
  } catch (const json::exception& e) {
    return fail(422, "SchemaViolation", e.what(), "");
  }
  return ok({{"p_char", p_char(samples)}, {"p_ticket", p_ticket(samples)}, {"samples", samples.size()}});
}

void bind_routes(httplib::Server& server, Service& service) {
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    const Response r = service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  server.Get(".*", route);
  server.Post(".*", route);
  server.Put(".*", route);
  server.Delete(".*", route);
}

int serve(const ServiceConfig& cfg) {
  LoadedConfig loaded;
  if (!cfg.pipeline_config.empty()) {
    loaded = load_config(cfg.pipeline_config);
  } else {
    loaded.pipeline = default_config();
  }
  Warehouse::Options store;
  store.dir = cfg.warehouse_dir;
  store.snapshot_every = cfg.snapshot_every;
  Service service(std::move(loaded), std::move(store));
  httplib::Server server;
  bind_routes(server, service);
  std::cerr << "listening on " << cfg.host << ":" << cfg.port << '\n';
  if (!server.listen(cfg.host, cfg.port)) {
    std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ftrs

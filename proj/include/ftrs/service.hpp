#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "ftrs/config.hpp"
#include "ftrs/pipeline.hpp"
#include "ftrs/warehouse.hpp"

namespace httplib {
class Server;
}

namespace ftrs {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path pipeline_config;  // empty: built-in defaults
  std::filesystem::path warehouse_dir;    // empty: memory only
  std::size_t snapshot_every = 1000;
};

/// Reads the service file (relative paths resolve against its directory),
/// then applies FTRS_HOST / FTRS_PORT from the environment.
ServiceConfig load_service_config(const std::filesystem::path& path);

struct Response {
  int status = 200;
  json body;
};

json ok_envelope(json data);
json error_envelope(const std::string& code, const std::string& message, const std::string& path = {});

std::string encode_cursor(std::int64_t ts, const std::string& id);
std::optional<std::pair<std::int64_t, std::string>> decode_cursor(const std::string& cursor);

class Service {
 public:
  Service(LoadedConfig cfg, Warehouse::Options store);

  Response handle(const std::string& method, const std::string& path,
                  const std::multimap<std::string, std::string>& query, const std::string& body);

  Warehouse& store() { return *store_; }
  const PipelineConfig& pipeline() const { return cfg_.pipeline; }

 private:
  Response submit(const std::string& body);
  Response get_ticket(const std::string& id);
  Response queue(const std::multimap<std::string, std::string>& query);
  Response audit(const std::string& id, const std::string& body);
  Response stats(const std::multimap<std::string, std::string>& query);
  Response push_sets();
  Response metrics_get();
  Response metrics_post(const std::string& body);

  LoadedConfig cfg_;
  BackendSet backends_;
  std::unique_ptr<Warehouse> store_;
  std::mutex submit_mu_;
  std::atomic<std::uint64_t> submitted_{0}, accepted_{0}, diverted_{0}, audits_{0}, rejected_{0};
};

/// Routes every request of `server` through `service.handle`.
void bind_routes(httplib::Server& server, Service& service);

/// Blocks serving HTTP until the process is stopped; returns an exit code.
int serve(const ServiceConfig& cfg);

}  // namespace ftrs

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "sqlsketch/catalog.hpp"
#include "sqlsketch/engine.hpp"

namespace sqlsketch {

struct ServiceOptions {
  /// When set, every session is written here as <id>.json after each change.
  std::optional<std::filesystem::path> snapshot_dir;
  std::size_t preview_rows = 5;
  /// Base directory for relative data_dir values in POST /databases.
  std::filesystem::path data_root = ".";
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/// The JSON API, independent of the HTTP transport. Every body carries
/// "v": 1. Requests to one session are serialized; distinct sessions run
/// in parallel.
class Service {
 public:
  explicit Service(ServiceOptions opts = {});

  /// `path` excludes the query string, which arrives parsed in `query`.
  ServiceResponse handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query,
                         const std::string& body);

  /// Registers an already-loaded catalog and returns its id.
  std::string add_database(std::shared_ptr<const Catalog> catalog);

 private:
  struct SessionSlot {
    std::mutex mu;
    std::string database_id;
    std::optional<Session> session;
  };

  ServiceResponse post_database(const nlohmann::json& body);
  ServiceResponse get_tables(const std::string& db);
  ServiceResponse get_preview(const std::string& db, const std::string& table,
                              const std::map<std::string, std::string>& query);
  ServiceResponse post_session(const nlohmann::json& body);
  ServiceResponse session_op(const std::string& id, const std::string& op,
                             const nlohmann::json& body);

  nlohmann::json resource(const std::string& id, const SessionSlot& slot) const;
  void snapshot(const std::string& id, const SessionSlot& slot) const;
  std::shared_ptr<const Catalog> find_database(const std::string& id) const;
  std::shared_ptr<SessionSlot> find_session(const std::string& id) const;

  ServiceOptions opts_;
  mutable std::mutex mu_;  // guards the two maps and the counters
  std::map<std::string, std::shared_ptr<const Catalog>> databases_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  std::uint64_t next_database_ = 1;
  std::uint64_t next_session_ = 1;
};

/// HTTP/1.1 front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sqlsketch

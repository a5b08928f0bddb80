#include "sqlsketch/service.hpp"

#include <fstream>

#include <httplib.h>

#include "sqlsketch/error.hpp"
#include "sqlsketch/eval.hpp"
#include "sqlsketch/lang.hpp"

namespace sqlsketch {

namespace {

using nlohmann::json;

json value_json(const Value& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

json table_json(const std::vector<std::string>& headers,
                const std::vector<std::vector<Value>>& rows) {
  json out_rows = json::array();
  for (const auto& r : rows) {
    json row = json::array();
    for (const auto& v : r) row.push_back(value_json(v));
    out_rows.push_back(std::move(row));
  }
  return {{"headers", headers}, {"rows", out_rows}};
}

json preview_json(const Preview& p) { return table_json(p.headers, p.rows); }

ServiceResponse reply(int status, json body) {
  body["v"] = 1;
  return {status, std::move(body)};
}

ServiceResponse fail(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return reply(status, std::move(extra));
}

int status_for(Errc c) {
  switch (c) {
    case Errc::MalformedSchema:
    case Errc::MissingTableFile:
    case Errc::TypeMismatch:
    case Errc::DanglingKeyReference:
    case Errc::DuplicateQualifiedColumn:
    case Errc::InvalidConfig:
    case Errc::Io:
      return 400;
    case Errc::SessionComplete:
    case Errc::EmptyHistory:
      return 409;
    default:
      return 422;
  }
}

ServiceResponse from_error(const Error& e) {
  json extra{{"code", std::string(errc_name(e.code()))}};
  if (const auto* s = dynamic_cast<const SyntaxError*>(&e))
    extra["location"] = {{"line", s->line()}, {"column", s->column()}};
  return fail(status_for(e.code()), e.what(), std::move(extra));
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Service::Service(ServiceOptions opts) : opts_(std::move(opts)) {
  if (opts_.snapshot_dir) std::filesystem::create_directories(*opts_.snapshot_dir);
}

std::string Service::add_database(std::shared_ptr<const Catalog> catalog) {
  std::lock_guard lock(mu_);
  std::string id = "db" + std::to_string(next_database_++);
  databases_[id] = std::move(catalog);
  return id;
}

std::shared_ptr<const Catalog> Service::find_database(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = databases_.find(id);
  return it == databases_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::SessionSlot> Service::find_session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse Service::handle(const std::string& method, const std::string& path,
                                const std::map<std::string, std::string>& query,
                                const std::string& body) {
  auto parts = split_path(path);
  json payload;
  if (method == "POST") {
    if (body.empty()) {
      payload = json::object();
    } else {
      payload = json::parse(body, nullptr, false);
      if (payload.is_discarded() || !payload.is_object())
        return fail(400, "request body must be a JSON object");
    }
  }
  try {
    std::size_t n = parts.size();
    if (n >= 1 && parts[0] == "databases") {
      if (n == 1 && method == "POST") return post_database(payload);
      if (n == 3 && parts[2] == "tables" && method == "GET") return get_tables(parts[1]);
      if (n == 5 && parts[2] == "tables" && parts[4] == "preview" && method == "GET")
        return get_preview(parts[1], parts[3], query);
    } else if (n >= 1 && parts[0] == "sessions") {
      if (n == 1 && method == "POST") return post_session(payload);
      if (n == 2 && method == "GET") return session_op(parts[1], "get", payload);
      if (n == 3 && method == "POST" && (parts[2] == "answer" || parts[2] == "undo"))
        return session_op(parts[1], parts[2], payload);
    }
    return fail(404, "no such endpoint: " + method + " " + path);
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return fail(400, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    return fail(500, e.what());
  }
}

ServiceResponse Service::post_database(const json& body) {
  if (!body.contains("schema") || !body["schema"].is_object())
    return fail(400, "missing 'schema' object");
  std::shared_ptr<const Catalog> catalog;
  if (body.contains("data") && body["data"].is_object()) {
    const json data = body["data"];
    DataSource source = [data](const std::string& file) -> std::optional<std::string> {
      auto it = data.find(file);
      if (it == data.end() || !it->is_string()) return std::nullopt;
      return it->get<std::string>();
    };
    catalog = std::make_shared<Catalog>(Catalog::from_schema(body["schema"], source));
  } else if (body.contains("data_dir") && body["data_dir"].is_string()) {
    std::filesystem::path dir = body["data_dir"].get<std::string>();
    if (dir.is_relative()) dir = opts_.data_root / dir;
    catalog = std::make_shared<Catalog>(
        Catalog::from_schema(body["schema"], Catalog::directory_source(dir)));
  } else {
    return fail(400, "need 'data' (file name to CSV text) or 'data_dir'");
  }
  return reply(201, {{"database_id", add_database(std::move(catalog))}});
}

ServiceResponse Service::get_tables(const std::string& db) {
  auto catalog = find_database(db);
  if (!catalog) return fail(404, "unknown database " + db);
  json names = json::array();
  for (const auto& t : catalog->tables()) names.push_back(t.name);
  return reply(200, {{"database_id", db}, {"tables", names}});
}

ServiceResponse Service::get_preview(const std::string& db, const std::string& table,
                                     const std::map<std::string, std::string>& query) {
  auto catalog = find_database(db);
  if (!catalog) return fail(404, "unknown database " + db);
  if (!catalog->find_table(table)) return fail(404, "unknown table " + table);
  std::size_t rows = opts_.preview_rows;
  if (auto it = query.find("rows"); it != query.end()) {
    try {
      std::size_t used = 0;
      long long k = std::stoll(it->second, &used);
      if (used != it->second.size() || k < 0) throw std::invalid_argument("rows");
      rows = static_cast<std::size_t>(k);
    } catch (const std::exception&) {
      return fail(400, "rows must be a non-negative integer");
    }
  }
  json out = preview_json(catalog->preview(table, rows));
  out["table"] = table;
  return reply(200, std::move(out));
}

ServiceResponse Service::post_session(const json& body) {
  if (!body.contains("database_id") || !body["database_id"].is_string())
    return fail(400, "missing 'database_id'");
  if (!body.contains("sketch") || !body["sketch"].is_string())
    return fail(400, "missing 'sketch' text");
  std::string db = body["database_id"].get<std::string>();
  auto catalog = find_database(db);
  if (!catalog) return fail(404, "unknown database " + db);
  SessionConfig cfg;
  if (body.contains("config")) {
    if (!body["config"].is_object()) return fail(400, "'config' must be an object");
    cfg = SessionConfig::from_json(body["config"]);
  }
  cfg.sampler.validate();
  auto slot = std::make_shared<SessionSlot>();
  slot->database_id = db;
  slot->session = Session::start(catalog, body["sketch"].get<std::string>(), cfg);
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_session_++);
    sessions_[id] = slot;
  }
  std::lock_guard lock(slot->mu);
  snapshot(id, *slot);
  return reply(201, resource(id, *slot));
}

ServiceResponse Service::session_op(const std::string& id, const std::string& op,
                                    const json& body) {
  auto slot = find_session(id);
  if (!slot) return fail(404, "unknown session " + id);
  std::lock_guard lock(slot->mu);
  Session& s = *slot->session;
  if (op == "answer") {
    if (!body.contains("accept") || !body["accept"].is_boolean())
      return fail(400, "missing boolean 'accept'");
    s.answer(body["accept"].get<bool>());
    snapshot(id, *slot);
  } else if (op == "undo") {
    s.undo();
    snapshot(id, *slot);
  }
  return reply(200, resource(id, *slot));
}

json Service::resource(const std::string& id, const SessionSlot& slot) const {
  const Session& s = *slot.session;
  json r{{"session_id", id},
         {"database_id", slot.database_id},
         {"status", std::string(status_name(s.status()))},
         {"sketch", print_sketch(s.sketch())},
         {"iterations", s.iterations()},
         {"accepts", s.accepts()},
         {"rejects", s.rejects()},
         {"can_undo", s.iterations() > 0},
         {"question", nullptr}};
  if (const auto& p = s.pending()) {
    json q = question_to_json(p->question);
    q["pi_plus"] = p->pi_plus;
    q["score"] = p->score;
    json previews = json::object();
    for (const auto& t : p->question.preview_tables)
      previews[t] = preview_json(s.catalog().preview(t, opts_.preview_rows));
    q["previews"] = std::move(previews);
    r["question"] = std::move(q);
  }
  if (s.status() == SessionStatus::Failed) {
    r["diagnostic"] = s.diagnostic();
    if (s.failure()) r["failure"] = std::string(errc_name(*s.failure()));
  }
  if (s.status() == SessionStatus::Complete) {
    json done{{"query", print_sketch(s.sketch())}};
    try {
      ResultTable t = dedup_display(evaluate(s.sketch(), s.catalog()));
      if (t.rows.size() > opts_.preview_rows) t.rows.resize(opts_.preview_rows);
      done["result"] = table_json(display_headers(t), t.rows);
    } catch (const Error& e) {
      done["error"] = e.what();
    }
    r["final"] = std::move(done);
  }
  return r;
}

void Service::snapshot(const std::string& id, const SessionSlot& slot) const {
  if (!opts_.snapshot_dir) return;
  json j{{"v", 1}, {"database_id", slot.database_id}, {"session", slot.session->to_json()}};
  auto file = *opts_.snapshot_dir / (id + ".json");
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      ServiceResponse out = service.handle(req.method, req.path, query, req.body);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    server.Get(R"(/.*)", route);
    server.Post(R"(/.*)", route);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace sqlsketch

#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "sqlsketch/engine.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"
#include "sqlsketch/service.hpp"
#include "support.hpp"

namespace sqlsketch {
namespace {

using nlohmann::json;
using testing::toy_catalog;

json toy_bundle() {
  json schema = json::parse(testing::read_file(testing::data_path("toy/schema.json")));
  json data = json::object();
  for (const char* f : {"authors.csv", "writes.csv", "publications.csv"})
    data[f] = testing::read_file(testing::data_path(std::string("toy/") + f));
  return {{"schema", schema}, {"data", data}};
}

json small_config() {
  return {{"sample_count", 40}, {"mh_steps", 200}, {"max_join_depth", 3}, {"seed", 1}};
}

struct Api {
  Service service;
  ServiceResponse call(const std::string& method, const std::string& path, const json& body = nullptr,
                       std::map<std::string, std::string> query = {}) {
    return service.handle(method, path, query, body.is_null() ? "" : body.dump());
  }
  std::string database() {
    auto r = call("POST", "/databases", toy_bundle());
    EXPECT_EQ(r.status, 201);
    return r.body["database_id"];
  }
  json session(const std::string& db, const std::string& sketch = testing::kAuthorSketch) {
    auto r = call("POST", "/sessions", {{"database_id", db}, {"sketch", sketch}, {"config", small_config()}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body;
  }
};

TEST(Service, DatabasesAndPreviews) {
  Api api;
  std::string db = api.database();
  auto tables = api.call("GET", "/databases/" + db + "/tables");
  EXPECT_EQ(tables.status, 200);
  EXPECT_EQ(tables.body["v"], 1);
  EXPECT_EQ(tables.body["tables"], json({"authors", "writes", "publications"}));
  auto p0 = api.call("GET", "/databases/" + db + "/tables/authors/preview", nullptr, {{"rows", "0"}});
  EXPECT_EQ(p0.status, 200);
  EXPECT_EQ(p0.body["headers"], json({"aid", "name"}));
  EXPECT_TRUE(p0.body["rows"].empty());
  auto p1 = api.call("GET", "/databases/" + db + "/tables/publications/preview", nullptr, {{"rows", "1"}});
  EXPECT_EQ(p1.body["rows"], json::parse(R"([[0, "Computability and λ-definability", 1937]])"));
  EXPECT_EQ(api.call("GET", "/databases/nope/tables").status, 404);
  EXPECT_EQ(api.call("GET", "/databases/" + db + "/tables/nope/preview").status, 404);
  EXPECT_EQ(api.call("GET", "/databases/" + db + "/tables/authors/preview", nullptr, {{"rows", "x"}}).status, 400);
}

TEST(Service, BadDatabases) {
  Api api;
  EXPECT_EQ(api.call("POST", "/databases", json::object()).status, 400);
  json bundle = toy_bundle();
  bundle["data"].erase("writes.csv");
  auto r = api.call("POST", "/databases", bundle);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["code"], "MissingTableFile");
  EXPECT_EQ(api.service.handle("POST", "/databases", {}, "{not json").status, 400);
  json dir{{"schema", toy_bundle()["schema"]}, {"data_dir", testing::data_path("toy")}};
  EXPECT_EQ(api.call("POST", "/databases", dir).status, 201);
}

TEST(Service, SessionParseErrorsCarryLocation) {
  Api api;
  std::string db = api.database();
  auto r = api.call("POST", "/sessions", {{"database_id", db}, {"sketch", "SELECT name\nFROM (authors WHERE"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["code"], "SyntaxError");
  EXPECT_EQ(r.body["location"]["line"], 2);
  EXPECT_EQ(api.call("POST", "/sessions", {{"database_id", "nope"}, {"sketch", "x"}}).status, 404);
  EXPECT_EQ(api.call("GET", "/sessions/nope").status, 404);
}

TEST(Service, QuestionPayloadHasPreviews) {
  Api api;
  json s = api.session(api.database());
  EXPECT_EQ(s["status"], "awaiting_answer");
  const json& q = s["question"];
  ASSERT_TRUE(q.is_object());
  EXPECT_TRUE(q.contains("summary"));
  EXPECT_TRUE(q.contains("result"));
  ASSERT_FALSE(q["preview_tables"].empty());
  for (const auto& t : q["preview_tables"]) EXPECT_TRUE(q["previews"].contains(t.get<std::string>()));
}

TEST(Service, GetIsIdempotentAndUndoRestores) {
  Api api;
  json s = api.session(api.database());
  std::string id = s["session_id"];
  auto g1 = api.call("GET", "/sessions/" + id);
  auto g2 = api.call("GET", "/sessions/" + id);
  EXPECT_EQ(g1.body, g2.body);
  EXPECT_EQ(g1.body, s);
  EXPECT_EQ(api.call("POST", "/sessions/" + id + "/undo").status, 409);
  auto a = api.call("POST", "/sessions/" + id + "/answer", {{"accept", true}});
  EXPECT_EQ(a.status, 200);
  EXPECT_EQ(a.body["iterations"], 1);
  auto u = api.call("POST", "/sessions/" + id + "/undo");
  EXPECT_EQ(u.status, 200);
  EXPECT_EQ(u.body, g1.body);
  EXPECT_EQ(api.call("POST", "/sessions/" + id + "/answer", json::object()).status, 400);
}

TEST(Service, OracleDrivenSessionCompletes) {
  Api api;
  json s = api.session(api.database());
  std::string id = s["session_id"];
  auto truth = testing::author_truth();
  int guard = 0;
  std::vector<bool> answers;
  while (s["status"] == "awaiting_answer" && guard++ < 100) {
    SketchAst result = parse_sketch(s["question"]["result"].get<std::string>(), *toy_catalog());
    bool yes = matches(result, truth);
    answers.push_back(yes);
    auto r = api.call("POST", "/sessions/" + id + "/answer", {{"accept", yes}});
    ASSERT_EQ(r.status, 200);
    s = r.body;
  }
  ASSERT_EQ(s["status"], "complete");
  EXPECT_EQ(s["final"]["query"], print_sketch(truth));
  EXPECT_EQ(s["final"]["result"]["rows"], json::parse(R"([["Alan M. Turing"]])"));
  EXPECT_TRUE(s["question"].is_null());
  auto again = api.call("POST", "/sessions/" + id + "/answer", {{"accept", true}});
  EXPECT_EQ(again.status, 409);
  // Same engine, same seed: the batch driver asks the same questions.
  SessionConfig cfg = SessionConfig::from_json(small_config());
  auto batch = run_batch(testing::author_sketch(), toy_catalog(), truth, cfg);
  ASSERT_EQ(batch.trace.size(), answers.size());
  for (std::size_t i = 0; i < answers.size(); ++i) EXPECT_EQ(batch.trace[i].answer, answers[i]);
}

TEST(Service, SnapshotsAreWritten) {
  auto dir = std::filesystem::temp_directory_path() / "sqlsketch_snapshots";
  std::filesystem::remove_all(dir);
  Api api{Service(ServiceOptions{dir, 5, "."})};
  json s = api.session(api.database());
  std::string id = s["session_id"];
  api.call("POST", "/sessions/" + id + "/answer", {{"accept", false}});
  json snap = json::parse(testing::read_file((dir / (id + ".json")).string()));
  EXPECT_EQ(snap["v"], 1);
  Session restored = Session::from_json(snap["session"], toy_catalog());
  EXPECT_EQ(restored.iterations(), 1u);
  EXPECT_EQ(restored.rejects(), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Service, OverHttp) {
  Service service;
  HttpServer server(service);
  int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);
  auto r = client.Post("/databases", toy_bundle().dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  std::string db = json::parse(r->body)["database_id"];
  auto tables = client.Get("/databases/" + db + "/tables");
  ASSERT_TRUE(tables);
  EXPECT_EQ(json::parse(tables->body)["tables"].size(), 3u);
  auto preview = client.Get("/databases/" + db + "/tables/writes/preview?rows=2");
  ASSERT_TRUE(preview);
  EXPECT_EQ(json::parse(preview->body)["rows"].size(), 2u);
  auto missing = client.Get("/sessions/s999");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  json body{{"database_id", db}, {"sketch", testing::kAuthorSketch}, {"config", small_config()}};
  auto s = client.Post("/sessions", body.dump(), "application/json");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->status, 201);
  EXPECT_EQ(json::parse(s->body)["status"], "awaiting_answer");
  server.stop();
  t.join();
}

}  // namespace
}  // namespace sqlsketch

#include "sqlsketch/cli.hpp"

#include <csignal>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "sqlsketch/bench.hpp"
#include "sqlsketch/error.hpp"
#include "sqlsketch/eval.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"
#include "sqlsketch/service.hpp"

namespace sqlsketch {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kSynthesisFailure = 2;
constexpr int kTimeout = 3;

struct Options {
  std::string schema;
  std::string data;
  std::string sketch;
  std::string oracle;
  std::string query;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  std::size_t mh_steps = 1000;
  std::size_t max_join_depth = 6;
  double lambda = 0;
  bool no_soft = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot_dir;
  std::string trace_out;
  std::size_t preview_rows = 5;
  // bench
  std::string manifest;
  std::size_t synthetic = 0;
  std::string mode = "full";
  std::string metrics_out;
  std::size_t max_iterations = 50;
  double timeout_seconds = 3600;
  bool no_timing = false;
};

std::string read_text(const std::string& file, std::istream& in) {
  if (file == "-") {
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  std::ifstream f(file, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot read " + file);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::shared_ptr<const Catalog> load_catalog(const Options& o) {
  if (o.schema.empty()) throw Error(Errc::InvalidConfig, "--schema is required");
  fs::path data = o.data.empty() ? fs::path(o.schema).parent_path() : fs::path(o.data);
  if (data.empty()) data = ".";
  return std::make_shared<Catalog>(Catalog::load(o.schema, data));
}

SessionConfig session_config(const Options& o) {
  SessionConfig c;
  c.sampler.sample_count = o.samples;
  c.sampler.mh_steps = o.mh_steps;
  c.sampler.max_join_depth = o.max_join_depth;
  c.sampler.seed = o.seed;
  c.lambda = o.lambda;
  c.sampler.validate();
  return c;
}

void print_table(std::ostream& out, const std::vector<std::string>& headers,
                 const std::vector<std::vector<Value>>& rows, const std::string& indent) {
  ResultTable t;
  t.columns = headers;
  t.rows = rows;
  std::istringstream lines(to_csv(t));
  for (std::string line; std::getline(lines, line);) out << indent << line << '\n';
}

void print_result(std::ostream& out, const Completion& q, const Catalog& catalog) {
  out << to_csv(dedup_display(evaluate(q, catalog)));
}

void write_trace(const std::string& file, const std::vector<TraceRecord>& trace) {
  if (file.empty()) return;
  std::ofstream out(file);
  if (!out) throw Error(Errc::Io, "cannot write " + file);
  for (const auto& r : trace) out << r.to_json().dump() << '\n';
}

void show_question(std::ostream& out, const Session& s, std::size_t preview_rows) {
  const ScoredQuestion& q = *s.pending();
  out << "\nQuestion " << s.iterations() + 1 << ":\n  " << q.question.seq.describe() << "\n";
  out << "Resulting sketch:\n";
  std::istringstream lines(print_sketch(q.question.result));
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
  for (const auto& t : q.question.preview_tables) {
    Preview p = s.catalog().preview(t, preview_rows);
    out << "Table " << t << ":\n";
    print_table(out, p.headers, p.rows, "  ");
  }
  out << "Accept? [y/n/u] " << std::flush;
}

int run_interactive(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto catalog = load_catalog(o);
  SketchAst sketch = parse_sketch(read_text(o.sketch, in), *catalog);
  if (o.no_soft) sketch = strip_soft(sketch);
  Session s = Session::start(catalog, std::move(sketch), session_config(o));
  while (s.status() == SessionStatus::AwaitingAnswer) {
    show_question(out, s, o.preview_rows);
    std::string word;
    if (!(in >> word)) {
      out << '\n';
      write_trace(o.trace_out, s.trace());
      err << "session aborted\n";
      return kInputError;
    }
    if (word == "y" || word == "yes") {
      s.answer(true);
    } else if (word == "n" || word == "no") {
      s.answer(false);
    } else if (word == "u" || word == "undo") {
      if (s.iterations() == 0)
        out << "nothing to undo\n";
      else
        s.undo();
    } else {
      out << "please answer y, n or u\n";
    }
  }
  write_trace(o.trace_out, s.trace());
  if (s.status() == SessionStatus::Failed) {
    err << "synthesis failed: " << s.diagnostic() << '\n';
    return kSynthesisFailure;
  }
  out << "\nFinal query:\n" << print_sketch(s.sketch()) << "\n\nResult:\n";
  print_result(out, s.sketch(), *catalog);
  return kOk;
}

int run_eval(const Options& o, std::istream& in, std::ostream& out) {
  auto catalog = load_catalog(o);
  std::string file = !o.query.empty() ? o.query : o.sketch;
  if (file.empty()) throw Error(Errc::InvalidConfig, "--query is required");
  SketchAst q = parse_sketch(read_text(file, in), *catalog);
  if (!is_complete(q)) throw Error(Errc::InvalidConfig, "the query still has holes");
  print_result(out, q, *catalog);
  return kOk;
}

int run_bench_command(const Options& o, std::istream& in, std::ostream& out) {
  auto mode = parse_bench_mode(o.mode);
  if (!mode) throw Error(Errc::InvalidConfig, "unknown --mode " + o.mode);
  if (o.no_soft) mode = BenchMode::NoSoft;

  std::vector<BenchCase> cases;
  std::vector<BenchRecord> load_errors;
  auto try_load = [&](const ManifestEntry& e) {
    try {
      cases.push_back(load_case(e));
    } catch (const Error& ex) {
      BenchRecord r;
      r.case_name = e.name;
      r.mode = *mode;
      r.status = "error";
      r.diagnostic = ex.what();
      load_errors.push_back(std::move(r));
    }
  };
  if (!o.manifest.empty()) {
    for (const auto& e : read_manifest(o.manifest)) try_load(e);
  } else if (o.synthetic > 0) {
    for (std::size_t i = 0; i < o.synthetic; ++i) {
      SyntheticCase c = generate_case(splitmix64(o.seed + i));
      c.name = "case" + std::to_string(i);
      cases.push_back(from_synthetic(std::move(c)));
    }
  } else {
    if (o.sketch.empty() || o.oracle.empty())
      throw Error(Errc::InvalidConfig, "bench needs --manifest, --synthetic, or --sketch with --oracle");
    auto catalog = load_catalog(o);
    BenchCase c;
    c.name = fs::path(o.sketch).stem().string();
    c.catalog = catalog;
    c.sketch = parse_sketch(read_text(o.sketch, in), *catalog);
    c.truth = parse_sketch(read_text(o.oracle, in), *catalog);
    cases.push_back(std::move(c));
  }

  BenchOptions opts;
  opts.session = session_config(o);
  opts.limits.max_iterations = o.max_iterations;
  opts.limits.wall = std::chrono::duration<double>(o.timeout_seconds);
  opts.timing = !o.no_timing;

  std::ofstream file;
  std::ostream* metrics = &out;
  if (!o.metrics_out.empty() && o.metrics_out != "-") {
    file.open(o.metrics_out);
    if (!file) throw Error(Errc::Io, "cannot write " + o.metrics_out);
    metrics = &file;
  }
  for (const auto& r : load_errors) *metrics << r.to_json().dump() << '\n';
  auto records = run_bench(cases, *mode, opts, *metrics);
  records.insert(records.end(), load_errors.begin(), load_errors.end());
  return bench_exit_code(records);
}

HttpServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

int run_serve(const Options& o, std::ostream& out, std::ostream& err) {
  ServiceOptions so;
  so.preview_rows = o.preview_rows;
  if (!o.snapshot_dir.empty()) so.snapshot_dir = o.snapshot_dir;
  Service service(so);
  if (!o.schema.empty()) out << "database " << service.add_database(load_catalog(o)) << '\n';
  HttpServer server(service);
  int port = server.bind(o.host, o.port);
  if (port < 0) {
    err << "cannot bind " << o.host << ":" << o.port << '\n';
    return kInputError;
  }
  out << "listening on http://" << o.host << ":" << port << std::endl;
  active_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  active_server = nullptr;
  return kOk;
}

void add_catalog_flags(CLI::App* app, Options& o) {
  app->add_option("--schema", o.schema, "Schema JSON file");
  app->add_option("--data", o.data, "Directory holding the table CSVs (default: the schema's)");
}

void add_sampler_flags(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--samples", o.samples, "Completions sampled per question")->check(CLI::PositiveNumber);
  app->add_option("--mh-steps", o.mh_steps, "Metropolis-Hastings steps per sample")->check(CLI::PositiveNumber);
  app->add_option("--max-join-depth", o.max_join_depth, "Most tables in one join chain")->check(CLI::PositiveNumber);
  app->add_option("--lambda", o.lambda, "Weight of completion size in its score");
  app->add_flag("--no-soft", o.no_soft, "Drop soft constraints from the sketch");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"Interactive SQL synthesis from sketches"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  add_catalog_flags(serve, o);
  serve->add_option("--host", o.host, "Address to bind");
  serve->add_option("--port", o.port, "Port to bind (0 picks one)");
  serve->add_option("--snapshot-dir", o.snapshot_dir, "Write session snapshots here");
  serve->add_option("--preview-rows", o.preview_rows, "Rows shown per table preview");

  auto* run = app.add_subcommand("run", "Answer questions in the terminal");
  add_catalog_flags(run, o);
  add_sampler_flags(run, o);
  run->add_option("--sketch", o.sketch, "Sketch file ('-' reads stdin)")->required();
  run->add_option("--trace-out", o.trace_out, "Write the question trace as JSON lines");
  run->add_option("--preview-rows", o.preview_rows, "Rows shown per table preview");

  auto* bench = app.add_subcommand("bench", "Answer questions from a known target query");
  add_catalog_flags(bench, o);
  add_sampler_flags(bench, o);
  bench->add_option("--sketch", o.sketch, "Sketch file");
  bench->add_option("--oracle", o.oracle, "Target query file");
  bench->add_option("--manifest", o.manifest, "JSON list of {schema, data, sketch, ground_truth}");
  bench->add_option("--synthetic", o.synthetic, "Generate this many random cases from --seed");
  bench->add_option("--mode", o.mode, "full, no-soft or perfect");
  bench->add_option("--metrics-out", o.metrics_out, "Metrics file (default stdout)");
  bench->add_option("--max-iterations", o.max_iterations, "Questions per case before timing out (0: no limit)");
  bench->add_option("--timeout-seconds", o.timeout_seconds, "Wall-clock budget per case (0: no limit)");
  bench->add_flag("--no-timing", o.no_timing, "Report 0 seconds so output is reproducible");

  auto* eval = app.add_subcommand("eval", "Evaluate a complete query and print CSV");
  add_catalog_flags(eval, o);
  eval->add_option("--query,--sketch", o.query, "Query file ('-' reads stdin)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kInputError;
  }

  try {
    if (*serve) return run_serve(o, out, err);
    if (*run) return run_interactive(o, in, out, err);
    if (*bench) return run_bench_command(o, in, out);
    if (*eval) return run_eval(o, in, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    if (e.code() == Errc::RejectionExhausted || e.code() == Errc::NoCandidates ||
        e.code() == Errc::NoValidExpansion || e.code() == Errc::EmptyCandidateList)
      return kSynthesisFailure;
    return kInputError;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace sqlsketch

#include "sqlsketch/bench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/model.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

namespace {

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::string_view bench_mode_name(BenchMode m) noexcept {
  switch (m) {
    case BenchMode::Full: return "full";
    case BenchMode::NoSoft: return "no-soft";
    case BenchMode::Perfect: return "perfect";
  }
  return "?";
}

std::optional<BenchMode> parse_bench_mode(std::string_view name) noexcept {
  for (auto m : {BenchMode::Full, BenchMode::NoSoft, BenchMode::Perfect})
    if (bench_mode_name(m) == name) return m;
  return std::nullopt;
}

BenchCase load_case(const ManifestEntry& entry) {
  BenchCase c;
  c.name = entry.name;
  c.catalog = std::make_shared<Catalog>(Catalog::load(entry.schema, entry.data));
  c.sketch = parse_sketch(read_text(entry.sketch), *c.catalog);
  c.truth = parse_sketch(read_text(entry.ground_truth), *c.catalog);
  return c;
}

BenchCase from_synthetic(SyntheticCase c) {
  return {std::move(c.name), std::move(c.catalog), std::move(c.sketch), std::move(c.truth)};
}

nlohmann::json BenchRecord::to_json() const {
  nlohmann::json j{{"case", case_name},
                   {"mode", std::string(bench_mode_name(mode))},
                   {"iterations", iterations},
                   {"accepts", accepts},
                   {"rejects", rejects},
                   {"seconds", seconds},
                   {"status", status}};
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

BenchRecord run_case(const BenchCase& c, BenchMode mode, const BenchOptions& opts,
                     std::size_t index) {
  BenchRecord rec;
  rec.case_name = c.name;
  rec.mode = mode;
  auto start = std::chrono::steady_clock::now();
  try {
    BatchResult r;
    if (mode == BenchMode::Perfect) {
      r = run_perfect_oracle(c.sketch, *c.catalog, c.truth, opts.session.sampler.max_join_depth);
    } else {
      SessionConfig cfg = opts.session;
      cfg.sampler.seed = splitmix64(opts.session.sampler.seed + index);
      bool strip = mode == BenchMode::NoSoft;
      r = run_batch(strip ? strip_soft(c.sketch) : c.sketch, c.catalog,
                    strip ? strip_soft(c.truth) : c.truth, cfg, opts.limits);
    }
    rec.iterations = r.iterations;
    rec.accepts = r.accepts;
    rec.rejects = r.rejects;
    rec.status = std::string(batch_status_name(r.status));
    rec.diagnostic = r.diagnostic;
    rec.final = r.final;
  } catch (const Error& e) {
    rec.status = "error";
    rec.diagnostic = e.what();
  }
  if (opts.timing)
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<BenchRecord> run_bench(const std::vector<BenchCase>& cases, BenchMode mode,
                                   const BenchOptions& opts, std::ostream& metrics) {
  std::vector<BenchRecord> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    out.push_back(run_case(cases[i], mode, opts, i));
    metrics << out.back().to_json().dump() << '\n';
    metrics.flush();
  }
  return out;
}

int bench_exit_code(const std::vector<BenchRecord>& records) {
  auto any = [&](const char* s) {
    return std::any_of(records.begin(), records.end(),
                       [&](const BenchRecord& r) { return r.status == s; });
  };
  if (any("error")) return 1;
  if (any("failed")) return 2;
  if (any("timeout")) return 3;
  return 0;
}

double median_iterations(const std::vector<BenchRecord>& records) {
  if (records.empty()) return 0;
  std::vector<double> v;
  for (const auto& r : records) v.push_back(static_cast<double>(r.iterations));
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace sqlsketch

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqlsketch/engine.hpp"
#include "sqlsketch/synthetic.hpp"

namespace sqlsketch {

enum class BenchMode { Full, NoSoft, Perfect };

std::string_view bench_mode_name(BenchMode m) noexcept;
/// "full", "no-soft" or "perfect".
std::optional<BenchMode> parse_bench_mode(std::string_view name) noexcept;

struct BenchCase {
  std::string name;
  std::shared_ptr<const Catalog> catalog;
  SketchAst sketch;
  Completion truth;
};

/// Reads schema, data, sketch and ground truth named by the entry.
BenchCase load_case(const ManifestEntry& entry);
BenchCase from_synthetic(SyntheticCase c);

struct BenchOptions {
  SessionConfig session;
  BatchLimits limits{50, std::chrono::hours(1)};
  bool timing = true;  // false reports 0 seconds so output is reproducible
};

struct BenchRecord {
  std::string case_name;
  BenchMode mode = BenchMode::Full;
  std::size_t iterations = 0;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  double seconds = 0;
  std::string status;  // complete, failed, timeout or error
  std::string diagnostic;
  std::optional<Completion> final;

  nlohmann::json to_json() const;
};

/// Runs one case. Case `index` picks the sampler seed, so the same index
/// gives the same run in every mode. Input errors come back as status
/// "error" rather than thrown.
BenchRecord run_case(const BenchCase& c, BenchMode mode, const BenchOptions& opts,
                     std::size_t index);

/// Runs every case and writes one JSON line per record.
std::vector<BenchRecord> run_bench(const std::vector<BenchCase>& cases, BenchMode mode,
                                   const BenchOptions& opts, std::ostream& metrics);

/// 0 when every case completed; otherwise 1 for input errors, then 2 for
/// synthesis failures, then 3 for timeouts.
int bench_exit_code(const std::vector<BenchRecord>& records);

double median_iterations(const std::vector<BenchRecord>& records);

}  // namespace sqlsketch

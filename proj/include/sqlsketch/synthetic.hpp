#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"

namespace sqlsketch {

struct SyntheticOptions {
  std::size_t min_tables = 3;
  std::size_t max_tables = 6;
  std::size_t max_chain = 3;  // tables in the planted join chain
  std::size_t min_rows = 5;
  std::size_t max_rows = 15;
  std::size_t min_columns = 3;  // data columns per table, keys excluded
  std::size_t max_columns = 5;
};

/// A random database with a planted target query and the sketch a user
/// would write for it: projection and selection columns left as holes, the
/// join chain left as one table hole carrying a soft constraint per hole
/// column.
struct SyntheticCase {
  std::string name;
  std::shared_ptr<const Catalog> catalog;
  SketchAst sketch;
  Completion truth;
};

/// Deterministic in `seed`. Tables form a random key tree; every data
/// column draws from its own value range or vocabulary so that soft
/// constraints can tell columns apart.
SyntheticCase generate_case(std::uint64_t seed, const SyntheticOptions& opts = {});

/// One manifest entry; paths are absolute or relative to the manifest.
struct ManifestEntry {
  std::string name;
  std::filesystem::path schema;
  std::filesystem::path data;
  std::filesystem::path sketch;
  std::filesystem::path ground_truth;
};

/// Writes the case as schema.json, CSVs, sketch.sql and truth.sql under
/// `dir` and returns its manifest entry.
ManifestEntry write_case(const SyntheticCase& c, const std::filesystem::path& dir);

/// Writes `count` cases (seeds derived from `seed`) plus manifest.json.
std::vector<ManifestEntry> write_suite(const std::filesystem::path& dir, std::size_t count,
                                       std::uint64_t seed, const SyntheticOptions& opts = {});

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries);

}  // namespace sqlsketch

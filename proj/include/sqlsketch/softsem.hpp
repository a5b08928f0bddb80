#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"
#include "sqlsketch/eval.hpp"

namespace sqlsketch {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Score of one primitive over a column of cells of type `column_type`:
/// membership and contains are indicators, the bound and about forms are
/// the fraction of satisfying cells. nullopt when the types do not fit.
/// An empty column scores 0.
std::optional<double> score_values(const SoftPrimitive& prim, ValueType column_type,
                                   std::span<const Value> cells);

/// Exact score of a primitive on an evaluated table. The primitive's column
/// must be a constant. Throws ColumnAbsent, TypeIncompatible, EmptyColumn.
double score_primitive(const SoftPrimitive& prim, const ResultTable& t);
/// Sum over the conjuncts; `true` scores 0.
double score_soft(const SoftConstraint& soft, const ResultTable& t);
/// Exact score of a completion: every soft block applied to the value of
/// the expression it annotates, summed.
double score_exact(const Completion& c, const Catalog& catalog);

/// Per-primitive column scores computed once on base tables.
class ThetaTable {
 public:
  ThetaTable() = default;

  static ThetaTable precompute(const SketchAst& sketch, const Catalog& catalog);

  /// nullopt for pairs that were never computed or do not type-check.
  std::optional<double> lookup(const std::string& key, ColumnId column) const;
  /// All entries for one primitive key, indexed by ColumnId; NaN when absent.
  const std::vector<double>* row(const std::string& key) const;
  std::vector<std::string> keys() const;

  nlohmann::json to_json() const;
  static ThetaTable from_json(const nlohmann::json& j, std::size_t column_count);

  /// Loads from `dir` when a cache entry for (sketch, catalog) exists,
  /// otherwise computes and writes one.
  static ThetaTable cached(const SketchAst& sketch, const Catalog& catalog,
                           const std::filesystem::path& dir);

  bool operator==(const ThetaTable& other) const;

 private:
  std::map<std::string, std::vector<double>> rows_;
};

/// Approximate score of a completion using theta on base tables, plus
/// lambda * size. -inf when a column is used outside the expression it
/// applies to, a join is not a key edge, a table repeats in the chain, a
/// comparison is ill-typed, or a theta entry is absent.
double score_completion(const Completion& c, const ThetaTable& theta, const Catalog& catalog,
                        double lambda);

/// exp(score); 0 for -inf.
double unnormalized_weight(const Completion& c, const ThetaTable& theta, const Catalog& catalog,
                           double lambda);

std::uint64_t sketch_hash(const SketchAst& sketch);

}  // namespace sqlsketch

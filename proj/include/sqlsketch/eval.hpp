#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"

namespace sqlsketch {

/// A relation with qualified column names. Joins keep both join columns.
struct ResultTable {
  std::vector<std::string> columns;  // qualified
  std::vector<ValueType> types;
  std::vector<std::vector<Value>> rows;

  std::optional<std::size_t> find(std::string_view qualified) const;
  /// Column values as a vector (copy); throws ColumnAbsent when missing.
  std::vector<Value> column_values(std::string_view qualified) const;

  bool operator==(const ResultTable&) const = default;
};

using ColumnSet = std::set<std::string>;

/// Inner-join chain semantics; soft blocks are ignored.
ResultTable evaluate(const TableExpr& expr, const Catalog& catalog);
/// Full query semantics: join chain, then select, then project.
ResultTable evaluate(const Completion& c, const Catalog& catalog);
/// The flat table after the select, before projection.
ResultTable evaluate_selection(const Completion& c, const Catalog& catalog);

/// Column-set semantics: a table gives its own columns, a join the union of
/// both sides. Holes contribute nothing.
ColumnSet approx_columns(const TableExpr& expr, const Catalog& catalog);
/// Projection restricts to the listed constant columns.
ColumnSet approx_columns(const SketchAst& q, const Catalog& catalog);

/// Copy with one column per bare name (first occurrence wins); join keys
/// carry equal values so nothing observable is lost on a join chain.
ResultTable dedup_display(const ResultTable& t);
/// Header names: bare where unique in the table, qualified otherwise.
std::vector<std::string> display_headers(const ResultTable& t);
/// CSV text (RFC 4180, CRLF line ends) with display headers.
std::string to_csv(const ResultTable& t);

}  // namespace sqlsketch

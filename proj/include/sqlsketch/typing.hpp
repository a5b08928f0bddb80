#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"

namespace sqlsketch {

struct KeyPair {
  ColumnId left;
  ColumnId right;

  bool operator==(const KeyPair&) const = default;
};

/// What each hole of a sketch may be filled with.
///
/// Column holes used as the join keys right before the table hole are
/// "bound": they are decided together with the table hole's first table and
/// never vary on their own.
struct SketchShape {
  std::optional<std::string> table_var;
  std::vector<TableId> prefix;  // concrete chain tables before the table hole
  std::optional<std::string> bound_left;
  std::optional<std::string> bound_right;
  /// Edges allowed into the first table of the table hole's fill; only
  /// meaningful when prefix is non-empty.
  std::vector<KeyPair> entering;

  std::vector<std::string> column_vars;
  std::vector<std::vector<ColumnId>> domains;  // parallel to column_vars
};

/// Columns of `catalog` a column hole may take given every place it is used:
/// comparisons and literal primitives fix the type, contains and regex ~=
/// need strings, join positions need a key column.
SketchShape analyze_sketch(const SketchAst& p, const Catalog& catalog);

/// Type-compatible columns for a single hole name (empty when unknown).
std::vector<ColumnId> column_domain(const SketchAst& p, const std::string& name,
                                    const Catalog& catalog);

}  // namespace sqlsketch

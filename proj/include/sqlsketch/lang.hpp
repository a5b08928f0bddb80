#pragma once

#include <string>
#include <string_view>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"

namespace sqlsketch {

/// Parses the surface syntax:
///
///   [ "(" ] SELECT col {, col} FROM texpr [ WHERE pred [ {soft} ] ] [ ")" {soft} ]
///   texpr := table INNER-JOIN atom ON col = col [ {soft} ] | atom
///   atom  := "(" texpr ")" [ {soft} ] | table [ {soft} ] | ??name:table [ {soft} ]
///   col   := name | table.name | ??name:column
///
/// Soft blocks hold AND-ed primitives: `(contains col "re")`,
/// `contains(col, "re")`, `x in col`, `col <= x`, `col >= x`, `col ~= x`,
/// `col ~= r"re"`, and the chain `lo <= col <= hi`. Bare column names must be
/// unique in the catalog; output column references are always qualified.
SketchAst parse_sketch(std::string_view text, const Catalog& catalog);

/// Parses a bare join chain, the text inside FROM ( ... ).
TableExpr parse_table_expr(std::string_view text, const Catalog& catalog);

/// Canonical text; parse_sketch(print_sketch(p)) == p.
std::string print_sketch(const SketchAst& ast);

std::string print_slot(const ColumnSlot& slot);
std::string print_soft(const SoftConstraint& soft);
std::string print_predicate(const Predicate& pred);
/// A chain printed as it appears inside FROM ( ... ).
std::string print_table_expr(const TableExpr& expr);

}  // namespace sqlsketch

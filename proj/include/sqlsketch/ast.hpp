#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sqlsketch/value.hpp"

namespace sqlsketch {

enum class HoleKind { Table, Column };

std::string_view hole_kind_name(HoleKind k) noexcept;

/// A named hole. Holes sharing a name must be filled identically.
struct Hole {
  std::string name;
  HoleKind kind = HoleKind::Column;

  bool operator==(const Hole&) const = default;
  auto operator<=>(const Hole&) const = default;
};

/// Column constant, always stored fully qualified.
struct ColumnRef {
  std::string table;
  std::string column;

  std::string qualified() const { return table + "." + column; }
  bool operator==(const ColumnRef&) const = default;
  auto operator<=>(const ColumnRef&) const = default;
};

/// The C nonterminal: a column constant or a column hole.
using ColumnSlot = std::variant<ColumnRef, Hole>;

enum class RelOp { Lt, Le, Eq, Gt, Ge };

std::string_view relop_symbol(RelOp op) noexcept;

struct Comparison {
  ColumnSlot column;
  RelOp op = RelOp::Eq;
  Value value;

  bool operator==(const Comparison&) const = default;
};

/// Hard select predicate (Psi). And/Or nodes are binary.
struct Predicate {
  enum class Kind { True, Compare, And, Or };

  Kind kind = Kind::True;
  Comparison comparison;           // Kind::Compare
  std::vector<Predicate> operands;  // Kind::And / Kind::Or, exactly two

  static Predicate truth() { return {}; }
  static Predicate compare(Comparison c);
  static Predicate conj(Predicate a, Predicate b);
  static Predicate disj(Predicate a, Predicate b);

  bool operator==(const Predicate&) const = default;
};

enum class SoftOp {
  Member,    // x in c
  Contains,  // contains(c, r)
  AtMost,    // c <~ x
  About,     // c ~= x
  AtLeast,   // c >~ x
};

struct SoftPrimitive {
  SoftOp op = SoftOp::AtLeast;
  ColumnSlot column;
  Value value;         // literal, or the pattern text when `regex` is set
  bool regex = false;  // always true for Contains

  /// Identity of the primitive with its column abstracted away; two
  /// primitives with the same key score a given column identically.
  std::string key() const;

  bool operator==(const SoftPrimitive&) const = default;
};

/// Conjunction of primitives; empty means `true`.
struct SoftConstraint {
  std::vector<SoftPrimitive> conjuncts;

  bool is_true() const noexcept { return conjuncts.empty(); }
  bool operator==(const SoftConstraint&) const = default;
};

/// T (a table constant) or a table hole; only the last link of a chain may
/// be a hole.
using TableSource = std::variant<std::string, Hole>;

/// One I node: its source table plus the soft block attached to the
/// sub-expression that starts here.
struct ChainLink {
  TableSource source;
  SoftConstraint soft;

  bool operator==(const ChainLink&) const = default;
};

/// Join columns between link k (left) and the sub-expression k+1 (right).
struct JoinKeys {
  ColumnSlot left;
  ColumnSlot right;

  bool operator==(const JoinKeys&) const = default;
};

/// Right-nested inner-join chain t0 |x| (t1 |x| (... tn)) stored flat.
/// Invariant: joins.size() + 1 == links.size() for non-empty chains.
struct TableExpr {
  std::vector<ChainLink> links;
  std::vector<JoinKeys> joins;

  bool has_tail_hole() const;
  const Hole* tail_hole() const;
  /// Sub-expression starting at link k.
  TableExpr suffix(std::size_t k) const;

  bool operator==(const TableExpr&) const = default;
};

/// Pi_{projection}( sigma_{where}( from {links[0].soft} ) {select_soft} ) {query_soft}
struct SketchAst {
  std::vector<ColumnSlot> projection;
  Predicate where;
  SoftConstraint select_soft;
  TableExpr from;
  SoftConstraint query_soft;

  bool operator==(const SketchAst&) const = default;
};

/// A hole-free sketch. Functions taking a Completion require is_complete().
using Completion = SketchAst;

}  // namespace sqlsketch

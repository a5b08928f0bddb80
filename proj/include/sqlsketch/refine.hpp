#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sqlsketch/ast.hpp"

namespace sqlsketch {

/// Fills every hole called `name` with `value`: a column constant for column
/// holes, or an inner-join chain for the table hole. A chain fill may itself
/// contain fresh holes; its first link's soft block is merged with the soft
/// block the hole carried.
struct HoleFill {
  std::string name;
  HoleKind kind = HoleKind::Column;
  std::variant<ColumnRef, TableExpr> value;

  bool operator==(const HoleFill&) const = default;
};

/// A one-step refinement. fills[0] is the target hole; any further fills are
/// join-column holes decided together with it.
struct ProductionSeq {
  std::vector<HoleFill> fills;

  const HoleFill& target() const { return fills.front(); }
  /// "??t:table =>* authors INNER-JOIN ..."; also the tie-break order.
  std::string describe() const;

  bool operator==(const ProductionSeq&) const = default;
};

struct HoleSite {
  std::string name;
  HoleKind kind = HoleKind::Column;
  std::size_t position = 0;  // pre-order index of the hole node

  bool operator==(const HoleSite&) const = default;
};

/// Every hole occurrence in pre-order (projection, predicate, chain, soft
/// blocks from the chain outwards).
std::vector<HoleSite> holes(const SketchAst& p);
std::set<std::string> hole_names(const SketchAst& p);
bool is_complete(const SketchAst& p);

/// Node count of the derivation tree.
std::size_t size(const SketchAst& p);

SketchAst apply_refinement(const SketchAst& p, const ProductionSeq& seq);

/// True when `candidate` is obtainable from `q` by filling q's holes,
/// same-named holes identically. Holes left in `candidate` are treated as
/// opaque symbols, so this also decides refinement between sketches.
bool matches(const SketchAst& q, const SketchAst& candidate);

/// Removes every soft block.
SketchAst strip_soft(const SketchAst& p);

/// Smallest "<base><k>" (k = 0, 1, ...) not in `used`; with `plain_first`
/// the bare base is tried before any numbered form.
std::string fresh_name(const std::string& base, const std::set<std::string>& used,
                       bool plain_first = false);

}  // namespace sqlsketch

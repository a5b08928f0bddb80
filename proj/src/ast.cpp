#include "sqlsketch/ast.hpp"

#include "sqlsketch/value.hpp"

namespace sqlsketch {

std::string_view hole_kind_name(HoleKind k) noexcept {
  return k == HoleKind::Table ? "table" : "column";
}

std::string_view relop_symbol(RelOp op) noexcept {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

Predicate Predicate::compare(Comparison c) {
  Predicate p;
  p.kind = Kind::Compare;
  p.comparison = std::move(c);
  return p;
}

Predicate Predicate::conj(Predicate a, Predicate b) {
  Predicate p;
  p.kind = Kind::And;
  p.operands.push_back(std::move(a));
  p.operands.push_back(std::move(b));
  return p;
}

Predicate Predicate::disj(Predicate a, Predicate b) {
  Predicate p;
  p.kind = Kind::Or;
  p.operands.push_back(std::move(a));
  p.operands.push_back(std::move(b));
  return p;
}

std::string SoftPrimitive::key() const {
  std::string lit = regex ? "r" + format_literal(Value(std::get<std::string>(value)))
                          : format_literal(value);
  switch (op) {
    case SoftOp::Member: return "in " + lit;
    case SoftOp::Contains: return "contains " + lit;
    case SoftOp::AtMost: return "<~ " + lit;
    case SoftOp::About: return "~= " + lit;
    case SoftOp::AtLeast: return ">~ " + lit;
  }
  return lit;
}

bool TableExpr::has_tail_hole() const { return tail_hole() != nullptr; }

const Hole* TableExpr::tail_hole() const {
  if (links.empty()) return nullptr;
  return std::get_if<Hole>(&links.back().source);
}

TableExpr TableExpr::suffix(std::size_t k) const {
  TableExpr out;
  out.links.assign(links.begin() + static_cast<std::ptrdiff_t>(k), links.end());
  if (k < joins.size())
    out.joins.assign(joins.begin() + static_cast<std::ptrdiff_t>(k), joins.end());
  return out;
}

}  // namespace sqlsketch

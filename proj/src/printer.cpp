#include "sqlsketch/lang.hpp"

namespace sqlsketch {

namespace {

std::string print_hole(const Hole& h) {
  return "??" + h.name + ":" + std::string(hole_kind_name(h.kind));
}

std::string print_source(const TableSource& s) {
  if (const auto* h = std::get_if<Hole>(&s)) return print_hole(*h);
  return std::get<std::string>(s);
}

std::string print_literal(const SoftPrimitive& p) {
  if (p.regex) return "r" + format_literal(p.value);
  return format_literal(p.value);
}

bool is_range_pair(const SoftPrimitive& a, const SoftPrimitive& b) {
  return a.op == SoftOp::AtLeast && b.op == SoftOp::AtMost && a.column == b.column &&
         !a.regex && !b.regex;
}

std::string print_primitive(const SoftPrimitive& p) {
  std::string col = print_slot(p.column);
  switch (p.op) {
    case SoftOp::Member: return "(" + format_literal(p.value) + " in " + col + ")";
    case SoftOp::Contains:
      return "(contains " + col + " " + format_literal(p.value) + ")";
    case SoftOp::AtMost: return "(" + col + " <= " + format_literal(p.value) + ")";
    case SoftOp::About: return "(" + col + " ~= " + print_literal(p) + ")";
    case SoftOp::AtLeast: return "(" + col + " >= " + format_literal(p.value) + ")";
  }
  return "true";
}

std::string print_chain(const TableExpr& e, std::size_t k, std::size_t indent);

std::string with_soft(std::string text, const SoftConstraint& soft) {
  if (soft.is_true()) return text;
  return text + " " + print_soft(soft);
}

std::string right_atom(const TableExpr& e, std::size_t k, std::size_t indent) {
  if (k + 1 == e.links.size()) return with_soft(print_source(e.links[k].source), e.links[k].soft);
  return "(" + print_chain(e, k, indent + 1) + ")";
}

std::string print_chain(const TableExpr& e, std::size_t k, std::size_t indent) {
  const ChainLink& link = e.links[k];
  if (k + 1 == e.links.size()) return with_soft(print_source(link.source), link.soft);
  std::string pad = "\n" + std::string(indent + 6, ' ');
  std::string out = print_source(link.source);
  out += pad + "INNER-JOIN " + right_atom(e, k + 1, indent + 11);
  out += pad + "ON " + print_slot(e.joins[k].left) + " = " + print_slot(e.joins[k].right);
  if (!link.soft.is_true()) out += pad + print_soft(link.soft);
  return out;
}

std::string print_pred(const Predicate& p, bool nested) {
  switch (p.kind) {
    case Predicate::Kind::True: return "true";
    case Predicate::Kind::Compare:
      return print_slot(p.comparison.column) + " " +
             std::string(relop_symbol(p.comparison.op)) + " " +
             format_literal(p.comparison.value);
    case Predicate::Kind::And:
    case Predicate::Kind::Or: {
      const char* op = p.kind == Predicate::Kind::And ? " AND " : " OR ";
      // The right operand is always parenthesized when compound, which keeps
      // the left-associative parse identical to the stored tree.
      std::string s = print_pred(p.operands[0], p.operands[0].kind != p.kind) + op +
                      print_pred(p.operands[1], true);
      return nested ? "(" + s + ")" : s;
    }
  }
  return "true";
}

}  // namespace

std::string print_slot(const ColumnSlot& slot) {
  if (const auto* h = std::get_if<Hole>(&slot)) return print_hole(*h);
  return std::get<ColumnRef>(slot).qualified();
}

std::string print_soft(const SoftConstraint& soft) {
  std::string out = "{";
  const auto& cs = soft.conjuncts;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i > 0) out += " AND ";
    if (i + 1 < cs.size() && is_range_pair(cs[i], cs[i + 1])) {
      out += "(" + format_literal(cs[i].value) + " <= " + print_slot(cs[i].column) +
             " <= " + format_literal(cs[i + 1].value) + ")";
      ++i;
    } else {
      out += print_primitive(cs[i]);
    }
  }
  return out + "}";
}

std::string print_predicate(const Predicate& pred) { return print_pred(pred, false); }

std::string print_table_expr(const TableExpr& expr) {
  if (expr.links.empty()) return "";
  return print_chain(expr, 0, 0);
}

std::string print_sketch(const SketchAst& ast) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < ast.projection.size(); ++i) {
    if (i > 0) out += ", ";
    out += print_slot(ast.projection[i]);
  }
  out += "\nFROM (" + print_table_expr(ast.from) + ")";
  if (ast.where.kind != Predicate::Kind::True || !ast.select_soft.is_true()) {
    out += "\nWHERE " + print_predicate(ast.where);
    if (!ast.select_soft.is_true()) out += " " + print_soft(ast.select_soft);
  }
  if (!ast.query_soft.is_true()) out = "(" + out + ") " + print_soft(ast.query_soft);
  return out;
}

}  // namespace sqlsketch

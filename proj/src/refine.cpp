#include "sqlsketch/refine.hpp"

#include <optional>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"

namespace sqlsketch {

namespace {

// Walks every slot in a fixed pre-order; the visitor also sees table holes.
template <class SlotFn, class TableFn>
void walk(const SketchAst& p, SlotFn&& on_slot, TableFn&& on_table) {
  for (const auto& s : p.projection) on_slot(s);
  auto walk_pred = [&](auto& self, const Predicate& pr) -> void {
    if (pr.kind == Predicate::Kind::Compare) on_slot(pr.comparison.column);
    for (const auto& o : pr.operands) self(self, o);
  };
  walk_pred(walk_pred, p.where);
  for (std::size_t k = 0; k < p.from.links.size(); ++k) {
    const auto& link = p.from.links[k];
    if (const auto* h = std::get_if<Hole>(&link.source)) on_table(*h);
    if (k < p.from.joins.size()) {
      on_slot(p.from.joins[k].left);
      on_slot(p.from.joins[k].right);
    }
  }
  for (auto it = p.from.links.rbegin(); it != p.from.links.rend(); ++it)
    for (const auto& prim : it->soft.conjuncts) on_slot(prim.column);
  for (const auto& prim : p.select_soft.conjuncts) on_slot(prim.column);
  for (const auto& prim : p.query_soft.conjuncts) on_slot(prim.column);
}

std::size_t slot_size(const ColumnSlot& s) { return std::holds_alternative<Hole>(s) ? 1 : 2; }

std::size_t prim_size(const SoftPrimitive& p) {
  // X in C, contains(C, r), C U X: the nonterminal, its operator and operands.
  return 1 + 1 + slot_size(p.column) + 1;
}

std::size_t soft_size(const SoftConstraint& s) {
  if (s.is_true()) return 2;
  std::size_t total = 0;
  for (const auto& p : s.conjuncts) total += 1 + prim_size(p);
  // Each binary conjunction adds a Phi node and the connective.
  return total + 2 * (s.conjuncts.size() - 1);
}

std::size_t pred_size(const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::True: return 2;
    case Predicate::Kind::Compare: return 1 + slot_size(p.comparison.column) + 1 + 1;
    default: return 1 + pred_size(p.operands[0]) + 1 + pred_size(p.operands[1]);
  }
}

std::size_t chain_size(const TableExpr& e) {
  std::size_t total = 0;
  for (std::size_t k = 0; k < e.links.size(); ++k) {
    const auto& link = e.links[k];
    if (std::holds_alternative<Hole>(link.source)) {
      total += 1 + (link.soft.is_true() ? 0 : soft_size(link.soft));
      continue;
    }
    total += 1 + 2 + soft_size(link.soft);
    if (k < e.joins.size())
      total += 1 + slot_size(e.joins[k].left) + slot_size(e.joins[k].right);
  }
  return total;
}

void fill_slot(ColumnSlot& s, const std::string& name, const ColumnRef& c) {
  if (const auto* h = std::get_if<Hole>(&s); h && h->name == name) s = c;
}

void fill_soft(SoftConstraint& soft, const std::string& name, const ColumnRef& c) {
  for (auto& p : soft.conjuncts) fill_slot(p.column, name, c);
}

void fill_pred(Predicate& p, const std::string& name, const ColumnRef& c) {
  if (p.kind == Predicate::Kind::Compare) fill_slot(p.comparison.column, name, c);
  for (auto& o : p.operands) fill_pred(o, name, c);
}

void fill_column(SketchAst& p, const std::string& name, const ColumnRef& c) {
  for (auto& s : p.projection) fill_slot(s, name, c);
  fill_pred(p.where, name, c);
  fill_soft(p.select_soft, name, c);
  fill_soft(p.query_soft, name, c);
  for (auto& link : p.from.links) fill_soft(link.soft, name, c);
  for (auto& j : p.from.joins) {
    fill_slot(j.left, name, c);
    fill_slot(j.right, name, c);
  }
}

void fill_table(SketchAst& p, const std::string& name, const TableExpr& chain) {
  auto& links = p.from.links;
  if (links.empty()) return;
  const auto* h = std::get_if<Hole>(&links.back().source);
  if (!h || h->name != name) return;
  SoftConstraint carried = std::move(links.back().soft);
  links.pop_back();
  std::size_t root = links.size();
  for (const auto& l : chain.links) links.push_back(l);
  for (const auto& j : chain.joins) p.from.joins.push_back(j);
  auto& root_soft = links[root].soft.conjuncts;
  root_soft.insert(root_soft.begin(), carried.conjuncts.begin(), carried.conjuncts.end());
}

using Binding = std::variant<ColumnSlot, TableExpr>;

class Matcher {
 public:
  bool run(const SketchAst& q, const SketchAst& c) {
    if (q.projection.size() != c.projection.size()) return false;
    for (std::size_t i = 0; i < q.projection.size(); ++i)
      if (!slot(q.projection[i], c.projection[i])) return false;
    if (!pred(q.where, c.where)) return false;
    if (!chain(q.from, c.from)) return false;
    return soft(q.select_soft, c.select_soft) && soft(q.query_soft, c.query_soft);
  }

 private:
  bool slot(const ColumnSlot& q, const ColumnSlot& c) {
    const auto* h = std::get_if<Hole>(&q);
    if (!h) return q == c;
    auto [it, fresh] = bound_.emplace(h->name, Binding(c));
    if (fresh) return true;
    const auto* prev = std::get_if<ColumnSlot>(&it->second);
    return prev && *prev == c;
  }

  bool pred(const Predicate& q, const Predicate& c) {
    if (q.kind != c.kind) return false;
    if (q.kind == Predicate::Kind::Compare)
      return q.comparison.op == c.comparison.op && q.comparison.value == c.comparison.value &&
             slot(q.comparison.column, c.comparison.column);
    for (std::size_t i = 0; i < q.operands.size(); ++i)
      if (!pred(q.operands[i], c.operands[i])) return false;
    return true;
  }

  bool soft(const SoftConstraint& q, const SoftConstraint& c) {
    if (q.conjuncts.size() != c.conjuncts.size()) return false;
    for (std::size_t i = 0; i < q.conjuncts.size(); ++i) {
      const auto& a = q.conjuncts[i];
      const auto& b = c.conjuncts[i];
      if (a.op != b.op || a.regex != b.regex || a.value != b.value) return false;
      if (!slot(a.column, b.column)) return false;
    }
    return true;
  }

  bool chain(const TableExpr& q, const TableExpr& c) {
    const Hole* tail = q.tail_hole();
    std::size_t fixed = tail ? q.links.size() - 1 : q.links.size();
    if (tail ? c.links.size() < q.links.size() : c.links.size() != q.links.size()) return false;
    for (std::size_t k = 0; k < fixed; ++k) {
      if (q.links[k].source != c.links[k].source) return false;
      if (!soft(q.links[k].soft, c.links[k].soft)) return false;
      if (k < q.joins.size()) {
        if (!slot(q.joins[k].left, c.joins[k].left)) return false;
        if (!slot(q.joins[k].right, c.joins[k].right)) return false;
      }
    }
    if (!tail) return true;
    // The hole's soft block sits at the root of whatever fills it.
    const auto& root_soft = c.links[fixed].soft;
    const auto& hole_soft = q.links[fixed].soft;
    if (root_soft.conjuncts.size() < hole_soft.conjuncts.size()) return false;
    SoftConstraint head{{root_soft.conjuncts.begin(),
                         root_soft.conjuncts.begin() +
                             static_cast<std::ptrdiff_t>(hole_soft.conjuncts.size())}};
    if (!soft(hole_soft, head)) return false;
    TableExpr fill = c.suffix(fixed);
    fill.links.front().soft.conjuncts.erase(
        fill.links.front().soft.conjuncts.begin(),
        fill.links.front().soft.conjuncts.begin() +
            static_cast<std::ptrdiff_t>(hole_soft.conjuncts.size()));
    auto [it, fresh] = bound_.emplace(tail->name, Binding(fill));
    if (fresh) return true;
    const auto* prev = std::get_if<TableExpr>(&it->second);
    return prev && *prev == fill;
  }

  std::map<std::string, Binding> bound_;
};

void strip(SoftConstraint& s) { s.conjuncts.clear(); }

}  // namespace

std::string ProductionSeq::describe() const {
  std::string out;
  for (std::size_t i = 0; i < fills.size(); ++i) {
    const auto& f = fills[i];
    if (i > 0) out += "; ";
    out += "??" + f.name + ":" + std::string(hole_kind_name(f.kind)) + " =>* ";
    if (const auto* c = std::get_if<ColumnRef>(&f.value)) {
      out += c->qualified();
    } else {
      std::string chain = print_table_expr(std::get<TableExpr>(f.value));
      // Collapse the printer's line breaks for a one-line summary.
      std::string flat;
      bool space = false;
      for (char ch : chain) {
        if (ch == '\n' || ch == ' ') {
          space = true;
          continue;
        }
        if (space && !flat.empty()) flat += ' ';
        space = false;
        flat += ch;
      }
      out += flat;
    }
  }
  return out;
}

std::vector<HoleSite> holes(const SketchAst& p) {
  std::vector<HoleSite> out;
  std::size_t pos = 0;
  walk(
      p,
      [&](const ColumnSlot& s) {
        if (const auto* h = std::get_if<Hole>(&s)) out.push_back({h->name, h->kind, pos});
        ++pos;
      },
      [&](const Hole& h) { out.push_back({h.name, h.kind, pos++}); });
  return out;
}

std::set<std::string> hole_names(const SketchAst& p) {
  std::set<std::string> out;
  for (const auto& h : holes(p)) out.insert(h.name);
  return out;
}

bool is_complete(const SketchAst& p) {
  bool any = false;
  walk(
      p, [&](const ColumnSlot& s) { any = any || std::holds_alternative<Hole>(s); },
      [&](const Hole&) { any = true; });
  return !any;
}

std::size_t size(const SketchAst& p) {
  std::size_t n = 1 + 1;  // Q, Pi
  for (const auto& s : p.projection) n += slot_size(s);
  n += 1 + 1 + pred_size(p.where) + chain_size(p.from) + soft_size(p.select_soft);  // S, sigma
  return n + soft_size(p.query_soft);
}

SketchAst apply_refinement(const SketchAst& p, const ProductionSeq& seq) {
  if (seq.fills.empty()) throw Error(Errc::NoSuchHole, "empty production sequence");
  std::map<std::string, HoleKind> present;
  for (const auto& h : holes(p)) present.emplace(h.name, h.kind);
  SketchAst out = p;
  for (const auto& f : seq.fills) {
    auto it = present.find(f.name);
    if (it == present.end()) throw Error(Errc::NoSuchHole, f.name);
    bool column_value = std::holds_alternative<ColumnRef>(f.value);
    if (it->second != f.kind || (f.kind == HoleKind::Column) != column_value)
      throw Error(Errc::KindMismatch, "hole '" + f.name + "' is a " +
                                          std::string(hole_kind_name(it->second)) + " hole");
    if (column_value) {
      fill_column(out, f.name, std::get<ColumnRef>(f.value));
    } else {
      const auto& chain = std::get<TableExpr>(f.value);
      if (chain.links.empty() || chain.joins.size() + 1 != chain.links.size())
        throw Error(Errc::KindMismatch, "malformed chain for hole '" + f.name + "'");
      fill_table(out, f.name, chain);
    }
  }
  return out;
}

bool matches(const SketchAst& q, const SketchAst& candidate) {
  return Matcher().run(q, candidate);
}

SketchAst strip_soft(const SketchAst& p) {
  SketchAst out = p;
  strip(out.select_soft);
  strip(out.query_soft);
  for (auto& l : out.from.links) strip(l.soft);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used,
                       bool plain_first) {
  if (plain_first && !used.count(base)) return base;
  for (std::size_t k = 0;; ++k) {
    std::string name = base + std::to_string(k);
    if (!used.count(name)) return name;
  }
}

}  // namespace sqlsketch

#include "sqlsketch/typing.hpp"

#include <algorithm>
#include <map>

namespace sqlsketch {

namespace {

struct Use {
  bool conflict = false;
  std::optional<ValueType> type;
  bool join_key = false;

  void need(ValueType t) {
    if (type && *type != t) conflict = true;
    type = t;
  }
};

class UseCollector {
 public:
  std::map<std::string, Use> uses;
  std::vector<std::string> order;

  void touch(const ColumnSlot& s) {
    if (const auto* h = std::get_if<Hole>(&s)) {
      if (!uses.count(h->name)) order.push_back(h->name);
      uses[h->name];
    }
  }

  Use* find(const ColumnSlot& s) {
    const auto* h = std::get_if<Hole>(&s);
    return h ? &uses[h->name] : nullptr;
  }

  void pred(const Predicate& p) {
    if (p.kind == Predicate::Kind::Compare) {
      touch(p.comparison.column);
      if (Use* u = find(p.comparison.column)) u->need(type_of(p.comparison.value));
    }
    for (const auto& o : p.operands) pred(o);
  }

  void soft(const SoftConstraint& s) {
    for (const auto& prim : s.conjuncts) {
      touch(prim.column);
      Use* u = find(prim.column);
      if (!u) continue;
      if (prim.op == SoftOp::Contains || prim.regex) {
        u->need(ValueType::String);
      } else {
        u->need(type_of(prim.value));
      }
    }
  }

  void run(const SketchAst& p) {
    for (const auto& s : p.projection) touch(s);
    pred(p.where);
    for (const auto& j : p.from.joins) {
      for (const auto* s : {&j.left, &j.right}) {
        touch(*s);
        if (Use* u = find(*s)) u->join_key = true;
      }
    }
    for (auto it = p.from.links.rbegin(); it != p.from.links.rend(); ++it) soft(it->soft);
    soft(p.select_soft);
    soft(p.query_soft);
  }
};

bool is_key_column(const Catalog& catalog, ColumnId c) {
  for (const auto& e : catalog.edges_from(catalog.table_of(c)))
    if (e.here == c) return true;
  return false;
}

bool admits(const Catalog& catalog, const Use& u, ColumnId c) {
  if (u.conflict) return false;
  if (u.type && catalog.column(c).value_type != *u.type) return false;
  if (u.join_key && !is_key_column(catalog, c)) return false;
  return true;
}

std::vector<ColumnId> domain_for(const Catalog& catalog, const Use& u) {
  std::vector<ColumnId> out;
  for (std::size_t i = 0; i < catalog.column_count(); ++i) {
    ColumnId c{static_cast<std::int32_t>(i)};
    if (admits(catalog, u, c)) out.push_back(c);
  }
  return out;
}

std::optional<ColumnId> constant(const Catalog& catalog, const ColumnSlot& s) {
  if (const auto* c = std::get_if<ColumnRef>(&s)) return catalog.find_column(c->qualified());
  return std::nullopt;
}

}  // namespace

SketchShape analyze_sketch(const SketchAst& p, const Catalog& catalog) {
  UseCollector uses;
  uses.run(p);

  SketchShape shape;
  const auto& links = p.from.links;
  const Hole* tail = p.from.tail_hole();
  std::size_t fixed = tail ? links.size() - 1 : links.size();
  for (std::size_t k = 0; k < fixed; ++k)
    shape.prefix.push_back(catalog.require_table(std::get<std::string>(links[k].source)));

  if (tail) {
    shape.table_var = tail->name;
    if (fixed > 0) {
      const JoinKeys& keys = p.from.joins[fixed - 1];
      auto hole_name = [](const ColumnSlot& s) -> std::optional<std::string> {
        if (const auto* h = std::get_if<Hole>(&s)) return h->name;
        return std::nullopt;
      };
      shape.bound_left = hole_name(keys.left);
      shape.bound_right = hole_name(keys.right);
      auto fixed_left = constant(catalog, keys.left);
      auto fixed_right = constant(catalog, keys.right);
      bool bad_left = !shape.bound_left && !fixed_left;
      bool bad_right = !shape.bound_right && !fixed_right;
      TableId last = shape.prefix.back();
      for (const auto& e : catalog.edges_from(last)) {
        if (bad_left || bad_right) break;
        if (std::find(shape.prefix.begin(), shape.prefix.end(), e.there_table) !=
            shape.prefix.end())
          continue;
        if (fixed_left && *fixed_left != e.here) continue;
        if (fixed_right && *fixed_right != e.there) continue;
        if (shape.bound_left && !admits(catalog, uses.uses[*shape.bound_left], e.here)) continue;
        if (shape.bound_right && !admits(catalog, uses.uses[*shape.bound_right], e.there))
          continue;
        if (shape.bound_left && shape.bound_right && *shape.bound_left == *shape.bound_right &&
            e.here != e.there)
          continue;
        shape.entering.push_back({e.here, e.there});
      }
    }
  }

  for (const auto& name : uses.order) {
    if (name == shape.bound_left || name == shape.bound_right) continue;
    shape.column_vars.push_back(name);
    shape.domains.push_back(domain_for(catalog, uses.uses[name]));
  }
  return shape;
}

std::vector<ColumnId> column_domain(const SketchAst& p, const std::string& name,
                                    const Catalog& catalog) {
  UseCollector uses;
  uses.run(p);
  auto it = uses.uses.find(name);
  if (it == uses.uses.end()) return {};
  return domain_for(catalog, it->second);
}

}  // namespace sqlsketch

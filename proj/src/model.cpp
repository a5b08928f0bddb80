#include "sqlsketch/model.hpp"

#include <algorithm>
#include <cmath>

#include "sqlsketch/error.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
  return std::min(i, n - 1);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SketchModel::SketchModel(const SketchAst& sketch, const Catalog& catalog,
                         const ThetaTable& theta, double lambda, std::size_t max_join_depth)
    : sketch_(sketch), catalog_(catalog), lambda_(lambda), max_depth_(max_join_depth) {
  shape_ = analyze_sketch(sketch, catalog);
  prefix_ = shape_.prefix;
  const auto& links = sketch.from.links;
  if (shape_.table_var) tail_index_ = links.size() - 1;

  for (const auto& j : sketch.from.joins)
    joins_.push_back({compile_slot(j.left), compile_slot(j.right)});

  auto walk_pred = [&](auto& self, const Predicate& p) -> void {
    if (p.kind == Predicate::Kind::Compare)
      compares_.push_back({compile_slot(p.comparison.column), type_of(p.comparison.value)});
    for (const auto& o : p.operands) self(self, o);
  };
  walk_pred(walk_pred, sketch.where);
  for (const auto& s : sketch.projection) projection_.push_back(compile_slot(s));

  auto block = [&](const SoftConstraint& soft, Scope scope, std::size_t suffix) {
    Block b{scope, {}};
    for (const auto& p : soft.conjuncts) b.prims.push_back({compile_slot(p.column), theta.row(p.key()), suffix});
    blocks_.push_back(std::move(b));
  };
  for (std::size_t k = 0; k < links.size(); ++k) block(links[k].soft, Scope::Suffix, k);
  block(sketch.select_soft, Scope::Flat, 0);
  block(sketch.query_soft, Scope::Projection, 0);

  // The derivation size depends only on how many tables the hole gets.
  if (catalog.column_count() > 0 && catalog.table_count() > 0) {
    Assignment dummy;
    dummy.columns.assign(shape_.column_vars.size(), ColumnId{0});
    if (!prefix_.empty() && shape_.table_var) dummy.chain.entering = KeyPair{ColumnId{0}, ColumnId{0}};
    std::size_t max_len = shape_.table_var ? std::max<std::size_t>(max_depth_, 1) : 0;
    for (std::size_t m = 0; m <= max_len; ++m) {
      if (shape_.table_var && m == 0) {
        size_by_fill_len_.push_back(0);
        continue;
      }
      dummy.chain.tables.assign(m, TableId{0});
      dummy.chain.keys.assign(m > 0 ? m - 1 : 0, KeyPair{ColumnId{0}, ColumnId{0}});
      size_by_fill_len_.push_back(static_cast<double>(size(materialize(dummy))));
    }
  }
}

SketchModel::Slot SketchModel::compile_slot(const ColumnSlot& s) const {
  Slot out;
  if (const auto* c = std::get_if<ColumnRef>(&s)) {
    if (auto id = catalog_.find_column(c->qualified())) {
      out.kind = SlotKind::Const;
      out.id = *id;
    }
    return out;
  }
  const auto& name = std::get<Hole>(s).name;
  if (shape_.bound_left && name == *shape_.bound_left) {
    out.kind = SlotKind::BoundLeft;
    return out;
  }
  if (shape_.bound_right && name == *shape_.bound_right) {
    out.kind = SlotKind::BoundRight;
    return out;
  }
  auto it = std::find(shape_.column_vars.begin(), shape_.column_vars.end(), name);
  if (it != shape_.column_vars.end()) {
    out.kind = SlotKind::Var;
    out.var = static_cast<std::size_t>(it - shape_.column_vars.begin());
  }
  return out;
}

std::optional<ColumnId> SketchModel::resolve(const Slot& s, const Assignment& a) const {
  switch (s.kind) {
    case SlotKind::Const: return s.id;
    case SlotKind::Var: return a.columns[s.var];
    case SlotKind::BoundLeft:
      if (a.chain.entering) return a.chain.entering->left;
      return std::nullopt;
    case SlotKind::BoundRight:
      if (a.chain.entering) return a.chain.entering->right;
      return std::nullopt;
    case SlotKind::Missing: return std::nullopt;
  }
  return std::nullopt;
}

double SketchModel::score(const Assignment& a) const {
  std::vector<int> pos(catalog_.table_count(), -1);
  std::vector<TableId> chain = prefix_;
  chain.insert(chain.end(), a.chain.tables.begin(), a.chain.tables.end());
  if (chain.empty()) return kNegInf;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    int& p = pos[index(chain[k])];
    if (p >= 0) return kNegInf;
    p = static_cast<int>(k);
  }
  auto in_suffix = [&](ColumnId c, std::size_t k) {
    int p = pos[index(catalog_.table_of(c))];
    return p >= 0 && static_cast<std::size_t>(p) >= k;
  };

  for (std::size_t k = 0; k < joins_.size(); ++k) {
    auto l = resolve(joins_[k].left, a);
    auto r = resolve(joins_[k].right, a);
    if (!l || !r || catalog_.table_of(*l) != chain[k] || !in_suffix(*r, k + 1) ||
        !catalog_.is_join_edge(*l, *r))
      return kNegInf;
  }
  for (const auto& c : compares_) {
    auto col = resolve(c.slot, a);
    if (!col || !in_suffix(*col, 0) || catalog_.column(*col).value_type != c.type)
      return kNegInf;
  }
  std::vector<ColumnId> projected;
  for (const auto& s : projection_) {
    auto col = resolve(s, a);
    if (!col || !in_suffix(*col, 0)) return kNegInf;
    projected.push_back(*col);
  }

  double total = 0;
  for (const auto& b : blocks_) {
    double sub = 0;
    for (const auto& p : b.prims) {
      auto col = resolve(p.slot, a);
      if (!col) return kNegInf;
      bool ok = false;
      switch (b.scope) {
        case Scope::Suffix: ok = in_suffix(*col, p.suffix); break;
        case Scope::Flat: ok = in_suffix(*col, 0); break;
        case Scope::Projection:
          ok = std::find(projected.begin(), projected.end(), *col) != projected.end();
          break;
      }
      if (!ok || !p.theta) return kNegInf;
      double v = (*p.theta)[index(*col)];
      if (std::isnan(v)) return kNegInf;
      sub += v;
    }
    total += sub;
  }
  if (lambda_ == 0) return total;
  std::size_t len = shape_.table_var ? a.chain.tables.size() : 0;
  return total + lambda_ * size_by_fill_len_.at(len);
}

SketchAst SketchModel::materialize(const Assignment& a) const {
  ProductionSeq seq;
  for (std::size_t i = 0; i < shape_.column_vars.size(); ++i) {
    const auto& def = catalog_.column(a.columns[i]);
    seq.fills.push_back({shape_.column_vars[i], HoleKind::Column,
                         ColumnRef{def.table_name, def.column_name}});
  }
  auto ref = [&](ColumnId c) {
    const auto& def = catalog_.column(c);
    return ColumnRef{def.table_name, def.column_name};
  };
  if (shape_.table_var) {
    TableExpr fill;
    for (TableId t : a.chain.tables) fill.links.push_back({catalog_.table(t).name, {}});
    for (const auto& k : a.chain.keys) fill.joins.push_back({ref(k.left), ref(k.right)});
    seq.fills.push_back({*shape_.table_var, HoleKind::Table, std::move(fill)});
    if (a.chain.entering) {
      if (shape_.bound_left)
        seq.fills.push_back({*shape_.bound_left, HoleKind::Column, ref(a.chain.entering->left)});
      if (shape_.bound_right && shape_.bound_right != shape_.bound_left)
        seq.fills.push_back(
            {*shape_.bound_right, HoleKind::Column, ref(a.chain.entering->right)});
    }
  }
  if (seq.fills.empty()) return sketch_;
  return apply_refinement(sketch_, seq);
}

std::size_t SketchModel::chain_options(const std::vector<TableId>& tables, std::size_t fill_len,
                                       std::vector<OrientedEdge>* out) const {
  if (prefix_.size() + fill_len >= max_depth_) return 0;
  std::size_t n = 0;
  for (const auto& e : catalog_.edges_from(tables.back())) {
    if (std::find(tables.begin(), tables.end(), e.there_table) != tables.end()) continue;
    ++n;
    if (out) out->push_back(e);
  }
  return n;
}

ChainFill SketchModel::propose_chain(Rng& rng) const {
  if (prefix_.size() + 1 > max_depth_ || catalog_.table_count() == 0)
    throw Error(Errc::NoValidExpansion, "no table fits within the join depth limit");
  ChainFill f;
  std::vector<TableId> tables = prefix_;
  if (prefix_.empty()) {
    tables.push_back(TableId{static_cast<std::int32_t>(uniform_index(rng, catalog_.table_count()))});
  } else {
    if (shape_.entering.empty())
      throw Error(Errc::NoValidExpansion,
                  "no key join leads out of " + catalog_.table(prefix_.back()).name);
    KeyPair e = shape_.entering[uniform_index(rng, shape_.entering.size())];
    f.entering = e;
    tables.push_back(catalog_.table_of(e.right));
  }
  f.tables.push_back(tables.back());
  std::vector<OrientedEdge> options;
  for (;;) {
    options.clear();
    if (chain_options(tables, f.tables.size(), &options) == 0) break;
    if (unit_uniform(rng) < 0.5) break;
    const auto& e = options[uniform_index(rng, options.size())];
    f.keys.push_back({e.here, e.there});
    f.tables.push_back(e.there_table);
    tables.push_back(e.there_table);
  }
  return f;
}

double SketchModel::chain_log_density(const ChainFill& chain) const {
  double lq = prefix_.empty() ? -std::log(static_cast<double>(catalog_.table_count()))
                              : -std::log(static_cast<double>(shape_.entering.size()));
  std::vector<TableId> tables = prefix_;
  for (std::size_t i = 0; i < chain.tables.size(); ++i) {
    tables.push_back(chain.tables[i]);
    std::size_t opts = chain_options(tables, i + 1, nullptr);
    if (opts == 0) continue;
    lq += std::log(0.5);
    if (i + 1 < chain.tables.size()) lq -= std::log(static_cast<double>(opts));
  }
  return lq;
}

ColumnId SketchModel::propose_column(std::size_t var, Rng& rng) const {
  const auto& dom = shape_.domains.at(var);
  if (dom.empty())
    throw Error(Errc::NoValidExpansion,
                "no column fits every use of ??" + shape_.column_vars[var] + ":column");
  return dom[uniform_index(rng, dom.size())];
}

void SketchModel::extend_all(ChainFill& fill, std::vector<ChainFill>& out) const {
  out.push_back(fill);
  std::vector<TableId> tables = prefix_;
  tables.insert(tables.end(), fill.tables.begin(), fill.tables.end());
  std::vector<OrientedEdge> options;
  chain_options(tables, fill.tables.size(), &options);
  for (const auto& e : options) {
    fill.keys.push_back({e.here, e.there});
    fill.tables.push_back(e.there_table);
    extend_all(fill, out);
    fill.keys.pop_back();
    fill.tables.pop_back();
  }
}

std::vector<ChainFill> SketchModel::enumerate_chains() const {
  std::vector<ChainFill> out;
  if (!shape_.table_var || prefix_.size() + 1 > max_depth_) return out;
  if (prefix_.empty()) {
    for (std::size_t t = 0; t < catalog_.table_count(); ++t) {
      ChainFill f;
      f.tables.push_back(TableId{static_cast<std::int32_t>(t)});
      extend_all(f, out);
    }
  } else {
    for (const auto& e : shape_.entering) {
      ChainFill f;
      f.entering = e;
      f.tables.push_back(catalog_.table_of(e.right));
      extend_all(f, out);
    }
  }
  return out;
}

}  // namespace sqlsketch

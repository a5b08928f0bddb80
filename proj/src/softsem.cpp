#include "sqlsketch/softsem.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

bool relation_holds(SoftOp op, const Value& cell, const Value& lit) {
  auto ord = compare_same_type(cell, lit);
  switch (op) {
    case SoftOp::AtMost: return ord <= 0;
    case SoftOp::About: return ord == 0;
    case SoftOp::AtLeast: return ord >= 0;
    default: return false;
  }
}

const std::string& pattern(const SoftPrimitive& p) { return std::get<std::string>(p.value); }

std::regex compile(const std::string& re) {
  try {
    return std::regex(re, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(Errc::TypeIncompatible, "bad regular expression \"" + re + "\": " + e.what());
  }
}

std::string qualified(const ColumnSlot& s) {
  if (const auto* h = std::get_if<Hole>(&s))
    throw Error(Errc::ColumnAbsent, "hole ??" + h->name + ":column");
  return std::get<ColumnRef>(s).qualified();
}

void collect(const SoftConstraint& s, std::vector<const SoftPrimitive*>& out) {
  for (const auto& p : s.conjuncts) out.push_back(&p);
}

}  // namespace

std::optional<double> score_values(const SoftPrimitive& prim, ValueType column_type,
                                   std::span<const Value> cells) {
  if (prim.op == SoftOp::Contains || prim.regex) {
    if (column_type != ValueType::String) return std::nullopt;
    std::regex re = compile(pattern(prim));
    std::size_t hits = 0;
    for (const auto& v : cells) {
      if (std::regex_match(std::get<std::string>(v), re)) {
        ++hits;
        if (prim.op == SoftOp::Contains) return 1.0;
      }
    }
    if (prim.op == SoftOp::Contains || cells.empty()) return 0.0;
    return static_cast<double>(hits) / static_cast<double>(cells.size());
  }
  if (type_of(prim.value) != column_type) return std::nullopt;
  if (prim.op == SoftOp::Member) {
    for (const auto& v : cells)
      if (v == prim.value) return 1.0;
    return 0.0;
  }
  if (cells.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& v : cells)
    if (relation_holds(prim.op, v, prim.value)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(cells.size());
}

double score_primitive(const SoftPrimitive& prim, const ResultTable& t) {
  std::string col = qualified(prim.column);
  auto idx = t.find(col);
  if (!idx) throw Error(Errc::ColumnAbsent, col);
  bool fraction = prim.op == SoftOp::AtMost || prim.op == SoftOp::About ||
                  prim.op == SoftOp::AtLeast;
  if (fraction && t.rows.empty()) throw Error(Errc::EmptyColumn, col);
  std::vector<Value> cells = t.column_values(col);
  auto s = score_values(prim, t.types[*idx], cells);
  if (!s)
    throw Error(Errc::TypeIncompatible,
                prim.key() + " on " + std::string(type_name(t.types[*idx])) + " column " + col);
  return *s;
}

double score_soft(const SoftConstraint& soft, const ResultTable& t) {
  double total = 0;
  for (const auto& p : soft.conjuncts) total += score_primitive(p, t);
  return total;
}

double score_exact(const Completion& c, const Catalog& catalog) {
  double total = 0;
  for (std::size_t k = 0; k < c.from.links.size(); ++k) {
    const auto& soft = c.from.links[k].soft;
    if (!soft.is_true()) total += score_soft(soft, evaluate(c.from.suffix(k), catalog));
  }
  if (!c.select_soft.is_true()) total += score_soft(c.select_soft, evaluate_selection(c, catalog));
  if (!c.query_soft.is_true()) total += score_soft(c.query_soft, evaluate(c, catalog));
  return total;
}

ThetaTable ThetaTable::precompute(const SketchAst& sketch, const Catalog& catalog) {
  std::vector<const SoftPrimitive*> prims;
  for (const auto& l : sketch.from.links) collect(l.soft, prims);
  collect(sketch.select_soft, prims);
  collect(sketch.query_soft, prims);

  ThetaTable out;
  std::size_t n = catalog.column_count();
  for (const SoftPrimitive* p : prims) {
    auto [it, fresh] = out.rows_.try_emplace(p->key(), std::vector<double>(n, kAbsent));
    std::vector<ColumnId> targets;
    if (const auto* c = std::get_if<ColumnRef>(&p->column)) {
      if (auto id = catalog.find_column(c->qualified())) targets.push_back(*id);
    } else {
      for (std::size_t i = 0; i < n; ++i) targets.push_back(ColumnId{static_cast<std::int32_t>(i)});
    }
    for (ColumnId c : targets) {
      if (!std::isnan(it->second[index(c)])) continue;
      auto s = score_values(*p, catalog.column(c).value_type, catalog.values(c));
      if (s) it->second[index(c)] = *s;
    }
  }
  return out;
}

std::optional<double> ThetaTable::lookup(const std::string& key, ColumnId column) const {
  auto it = rows_.find(key);
  if (it == rows_.end() || index(column) >= it->second.size()) return std::nullopt;
  double v = it->second[index(column)];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

const std::vector<double>* ThetaTable::row(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

std::vector<std::string> ThetaTable::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : rows_) out.push_back(k);
  return out;
}

nlohmann::json ThetaTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : rows_) {
    nlohmann::json entries = nlohmann::json::object();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!std::isnan(v[i])) entries[std::to_string(i)] = v[i];
    j[k] = std::move(entries);
  }
  return j;
}

ThetaTable ThetaTable::from_json(const nlohmann::json& j, std::size_t column_count) {
  ThetaTable out;
  for (const auto& [k, entries] : j.items()) {
    std::vector<double> row(column_count, kAbsent);
    for (const auto& [idx, v] : entries.items()) {
      std::size_t i = std::stoul(idx);
      if (i >= column_count) throw Error(Errc::Io, "theta cache does not fit the catalog");
      row[i] = v.get<double>();
    }
    out.rows_.emplace(k, std::move(row));
  }
  return out;
}

ThetaTable ThetaTable::cached(const SketchAst& sketch, const Catalog& catalog,
                              const std::filesystem::path& dir) {
  std::ostringstream name;
  name << "theta-" << std::hex << sketch_hash(sketch) << "-" << catalog.fingerprint() << ".json";
  std::filesystem::path file = dir / name.str();
  if (std::ifstream in{file}) {
    try {
      return from_json(nlohmann::json::parse(in), catalog.column_count());
    } catch (const nlohmann::json::exception&) {
      // fall through and rebuild a corrupt entry
    }
  }
  ThetaTable t = precompute(sketch, catalog);
  std::filesystem::create_directories(dir);
  std::ofstream out{file};
  if (!out) throw Error(Errc::Io, "cannot write " + file.string());
  out << t.to_json().dump() << '\n';
  return t;
}

bool ThetaTable::operator==(const ThetaTable& other) const {
  if (rows_.size() != other.rows_.size()) return false;
  for (const auto& [k, v] : rows_) {
    auto it = other.rows_.find(k);
    if (it == other.rows_.end() || it->second.size() != v.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      bool a = std::isnan(v[i]), b = std::isnan(it->second[i]);
      if (a != b || (!a && v[i] != it->second[i])) return false;
    }
  }
  return true;
}

namespace {

// Column-membership view of the chain: which chain position owns each table.
struct ChainScope {
  std::vector<int> position;  // by TableId; -1 when absent

  bool in_suffix(const Catalog& catalog, ColumnId c, std::size_t k) const {
    int p = position[index(catalog.table_of(c))];
    return p >= 0 && static_cast<std::size_t>(p) >= k;
  }
};

std::optional<ColumnId> resolve(const Catalog& catalog, const ColumnSlot& s) {
  const auto* c = std::get_if<ColumnRef>(&s);
  if (!c) return std::nullopt;
  return catalog.find_column(c->qualified());
}

bool pred_ok(const Predicate& p, const Catalog& catalog, const ChainScope& scope) {
  if (p.kind == Predicate::Kind::Compare) {
    auto c = resolve(catalog, p.comparison.column);
    return c && scope.in_suffix(catalog, *c, 0) &&
           catalog.column(*c).value_type == type_of(p.comparison.value);
  }
  for (const auto& o : p.operands)
    if (!pred_ok(o, catalog, scope)) return false;
  return true;
}

template <class InScope>
double soft_score(const SoftConstraint& soft, const ThetaTable& theta, const Catalog& catalog,
                  InScope&& in_scope) {
  double total = 0;
  for (const auto& p : soft.conjuncts) {
    auto c = resolve(catalog, p.column);
    if (!c || !in_scope(*c)) return kNegInf;
    auto v = theta.lookup(p.key(), *c);
    if (!v) return kNegInf;
    total += *v;
  }
  return total;
}

}  // namespace

double score_completion(const Completion& c, const ThetaTable& theta, const Catalog& catalog,
                        double lambda) {
  const auto& links = c.from.links;
  if (links.empty()) return kNegInf;
  ChainScope scope{std::vector<int>(catalog.table_count(), -1)};
  std::vector<TableId> tables;
  for (std::size_t k = 0; k < links.size(); ++k) {
    const auto* name = std::get_if<std::string>(&links[k].source);
    if (!name) return kNegInf;
    auto t = catalog.find_table(*name);
    if (!t || scope.position[index(*t)] >= 0) return kNegInf;
    scope.position[index(*t)] = static_cast<int>(k);
    tables.push_back(*t);
  }
  for (std::size_t k = 0; k < c.from.joins.size(); ++k) {
    auto l = resolve(catalog, c.from.joins[k].left);
    auto r = resolve(catalog, c.from.joins[k].right);
    if (!l || !r || catalog.table_of(*l) != tables[k] || !scope.in_suffix(catalog, *r, k + 1) ||
        !catalog.is_join_edge(*l, *r))
      return kNegInf;
  }
  if (!pred_ok(c.where, catalog, scope)) return kNegInf;
  std::set<ColumnId> projected;
  for (const auto& s : c.projection) {
    auto col = resolve(catalog, s);
    if (!col || !scope.in_suffix(catalog, *col, 0)) return kNegInf;
    projected.insert(*col);
  }

  double total = 0;
  for (std::size_t k = 0; k < links.size(); ++k) {
    total += soft_score(links[k].soft, theta, catalog,
                        [&](ColumnId col) { return scope.in_suffix(catalog, col, k); });
    if (total == kNegInf) return kNegInf;
  }
  total += soft_score(c.select_soft, theta, catalog,
                      [&](ColumnId col) { return scope.in_suffix(catalog, col, 0); });
  if (total == kNegInf) return kNegInf;
  total += soft_score(c.query_soft, theta, catalog,
                      [&](ColumnId col) { return projected.count(col) > 0; });
  if (total == kNegInf) return kNegInf;
  return total + lambda * static_cast<double>(size(c));
}

double unnormalized_weight(const Completion& c, const ThetaTable& theta, const Catalog& catalog,
                           double lambda) {
  double s = score_completion(c, theta, catalog, lambda);
  return s == kNegInf ? 0.0 : std::exp(s);
}

std::uint64_t sketch_hash(const SketchAst& sketch) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : print_sketch(sketch)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace sqlsketch

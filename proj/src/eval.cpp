#include "sqlsketch/eval.hpp"

#include <map>
#include <sstream>
#include <unordered_map>

#include "sqlsketch/csv.hpp"
#include "sqlsketch/error.hpp"

namespace sqlsketch {

namespace {

std::string bare(const std::string& qualified) {
  auto dot = qualified.find('.');
  return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

const std::string& table_name(const TableSource& s) {
  if (const auto* h = std::get_if<Hole>(&s))
    throw Error(Errc::UnresolvedTable, "hole ??" + h->name + ":table");
  return std::get<std::string>(s);
}

std::string column_name(const ColumnSlot& s) {
  if (const auto* h = std::get_if<Hole>(&s))
    throw Error(Errc::UnresolvedColumn, "hole ??" + h->name + ":column");
  return std::get<ColumnRef>(s).qualified();
}

std::size_t require(const ResultTable& t, const std::string& col, const char* where) {
  auto i = t.find(col);
  if (!i) throw Error(Errc::UnresolvedColumn, col + " is not a column of the " + where);
  return *i;
}

ResultTable base_table(const std::string& name, const Catalog& catalog) {
  TableId id = catalog.require_table(name);
  const TableData& data = catalog.table(id);
  ResultTable out;
  for (const auto& c : data.columns) {
    out.columns.push_back(c.qualified());
    out.types.push_back(c.value_type);
  }
  out.rows = data.rows;
  return out;
}

ResultTable join(const ResultTable& left, std::size_t lcol, const ResultTable& right,
                 std::size_t rcol) {
  ResultTable out;
  out.columns = left.columns;
  out.columns.insert(out.columns.end(), right.columns.begin(), right.columns.end());
  out.types = left.types;
  out.types.insert(out.types.end(), right.types.begin(), right.types.end());

  std::unordered_map<Value, std::vector<std::size_t>, ValueHash> index;
  for (std::size_t r = 0; r < right.rows.size(); ++r) index[right.rows[r][rcol]].push_back(r);
  for (const auto& lrow : left.rows) {
    auto it = index.find(lrow[lcol]);
    if (it == index.end()) continue;
    for (std::size_t r : it->second) {
      std::vector<Value> row = lrow;
      row.insert(row.end(), right.rows[r].begin(), right.rows[r].end());
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

bool holds(const Value& cell, RelOp op, const Value& lit) {
  auto ord = compare_same_type(cell, lit);
  switch (op) {
    case RelOp::Lt: return ord < 0;
    case RelOp::Le: return ord <= 0;
    case RelOp::Eq: return ord == 0;
    case RelOp::Gt: return ord > 0;
    case RelOp::Ge: return ord >= 0;
  }
  return false;
}

// Resolves a predicate once against the table layout, checking types.
struct BoundPred {
  Predicate::Kind kind = Predicate::Kind::True;
  std::size_t col = 0;
  RelOp op = RelOp::Eq;
  Value value;
  std::vector<BoundPred> operands;

  bool eval(const std::vector<Value>& row) const {
    switch (kind) {
      case Predicate::Kind::True: return true;
      case Predicate::Kind::Compare: return holds(row[col], op, value);
      case Predicate::Kind::And: return operands[0].eval(row) && operands[1].eval(row);
      case Predicate::Kind::Or: return operands[0].eval(row) || operands[1].eval(row);
    }
    return false;
  }
};

BoundPred bind(const Predicate& p, const ResultTable& t) {
  BoundPred out;
  out.kind = p.kind;
  if (p.kind == Predicate::Kind::Compare) {
    std::string col = column_name(p.comparison.column);
    out.col = require(t, col, "selected table");
    if (t.types[out.col] != type_of(p.comparison.value))
      throw Error(Errc::TypeErrorInPredicate,
                  col + " is " + std::string(type_name(t.types[out.col])) + " but " +
                      format_literal(p.comparison.value) + " is " +
                      std::string(type_name(type_of(p.comparison.value))));
    out.op = p.comparison.op;
    out.value = p.comparison.value;
  }
  for (const auto& o : p.operands) out.operands.push_back(bind(o, t));
  return out;
}

}  // namespace

std::optional<std::size_t> ResultTable::find(std::string_view qualified) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == qualified) return i;
  return std::nullopt;
}

std::vector<Value> ResultTable::column_values(std::string_view qualified) const {
  auto i = find(qualified);
  if (!i) throw Error(Errc::ColumnAbsent, std::string(qualified));
  std::vector<Value> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[*i]);
  return out;
}

ResultTable evaluate(const TableExpr& expr, const Catalog& catalog) {
  if (expr.links.empty()) throw Error(Errc::UnresolvedTable, "empty table expression");
  std::size_t k = expr.links.size() - 1;
  ResultTable acc = base_table(table_name(expr.links[k].source), catalog);
  while (k-- > 0) {
    ResultTable left = base_table(table_name(expr.links[k].source), catalog);
    std::size_t lcol = require(left, column_name(expr.joins[k].left), "join's left table");
    std::size_t rcol = require(acc, column_name(expr.joins[k].right), "join's right operand");
    acc = join(left, lcol, acc, rcol);
  }
  return acc;
}

ResultTable evaluate_selection(const Completion& c, const Catalog& catalog) {
  ResultTable flat = evaluate(c.from, catalog);
  BoundPred pred = bind(c.where, flat);
  if (c.where.kind == Predicate::Kind::True) return flat;
  ResultTable out;
  out.columns = flat.columns;
  out.types = flat.types;
  for (auto& row : flat.rows)
    if (pred.eval(row)) out.rows.push_back(std::move(row));
  return out;
}

ResultTable evaluate(const Completion& c, const Catalog& catalog) {
  ResultTable sel = evaluate_selection(c, catalog);
  std::vector<std::size_t> picks;
  ResultTable out;
  for (const auto& slot : c.projection) {
    std::string col = column_name(slot);
    std::size_t i = require(sel, col, "selected table");
    picks.push_back(i);
    out.columns.push_back(col);
    out.types.push_back(sel.types[i]);
  }
  out.rows.reserve(sel.rows.size());
  for (const auto& row : sel.rows) {
    std::vector<Value> r;
    r.reserve(picks.size());
    for (std::size_t i : picks) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

ColumnSet approx_columns(const TableExpr& expr, const Catalog& catalog) {
  ColumnSet out;
  for (const auto& link : expr.links) {
    const auto* name = std::get_if<std::string>(&link.source);
    if (!name) continue;
    TableId t = catalog.require_table(*name);
    for (const auto& c : catalog.table(t).columns) out.insert(c.qualified());
  }
  return out;
}

ColumnSet approx_columns(const SketchAst& q, const Catalog& catalog) {
  ColumnSet flat = approx_columns(q.from, catalog);
  ColumnSet out;
  for (const auto& slot : q.projection)
    if (const auto* c = std::get_if<ColumnRef>(&slot); c && flat.count(c->qualified()))
      out.insert(c->qualified());
  return out;
}

ResultTable dedup_display(const ResultTable& t) {
  std::vector<std::size_t> keep;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (seen.insert(bare(t.columns[i])).second) keep.push_back(i);
  ResultTable out;
  for (std::size_t i : keep) {
    out.columns.push_back(t.columns[i]);
    out.types.push_back(t.types[i]);
  }
  for (const auto& row : t.rows) {
    std::vector<Value> r;
    for (std::size_t i : keep) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> display_headers(const ResultTable& t) {
  std::map<std::string, int> counts;
  for (const auto& c : t.columns) ++counts[bare(c)];
  std::vector<std::string> out;
  for (const auto& c : t.columns) out.push_back(counts[bare(c)] == 1 ? bare(c) : c);
  return out;
}

std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  csv::write_record(out, display_headers(t));
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(format_value(v));
    csv::write_record(out, cells);
  }
  return out.str();
}

}  // namespace sqlsketch

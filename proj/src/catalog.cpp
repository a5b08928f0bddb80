#include "sqlsketch/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sqlsketch/csv.hpp"
#include "sqlsketch/error.hpp"

namespace sqlsketch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

KeyRole parse_key(const json& key, const std::string& where) {
  if (key.is_null()) return {};
  if (key.is_string()) {
    const auto& s = key.get_ref<const std::string&>();
    if (s == "none") return {};
    if (s == "primary") return {KeyKind::Primary, {}};
    throw Error(Errc::MalformedSchema, where + ": unknown key role '" + s + "'");
  }
  if (key.is_object() && key.contains("foreign") && key["foreign"].is_string())
    return {KeyKind::Foreign, key["foreign"].get<std::string>()};
  throw Error(Errc::MalformedSchema, where + ": malformed key role");
}

json key_json(const KeyRole& key) {
  switch (key.kind) {
    case KeyKind::None: return "none";
    case KeyKind::Primary: return "primary";
    case KeyKind::Foreign: return json{{"foreign", key.target}};
  }
  return "none";
}

std::string require_string(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object() || !obj.contains(field) || !obj[field].is_string())
    throw Error(Errc::MalformedSchema, where + ": missing string field '" + field + "'");
  return obj[field].get<std::string>();
}

void load_rows(TableData& table, const std::string& text) {
  auto records = csv::parse(text);
  if (records.empty())
    throw Error(Errc::MalformedSchema, table.file + ": missing header row");
  const auto& header = records.front().fields;
  bool header_ok = header.size() == table.columns.size();
  for (std::size_t k = 0; header_ok && k < header.size(); ++k)
    header_ok = header[k].text == table.columns[k].column_name;
  if (!header_ok)
    throw Error(Errc::MalformedSchema,
                table.file + ": header does not match declared column order");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    // A lone empty line is not a record.
    if (rec.fields.size() == 1 && rec.fields[0].text.empty() && !rec.fields[0].quoted &&
        table.columns.size() != 1)
      continue;
    if (rec.fields.size() != table.columns.size())
      throw Error(Errc::TypeMismatch, table.file + ":" + std::to_string(rec.line) +
                                          ": expected " +
                                          std::to_string(table.columns.size()) +
                                          " cells, found " +
                                          std::to_string(rec.fields.size()));
    std::vector<Value> row;
    row.reserve(rec.fields.size());
    for (std::size_t k = 0; k < rec.fields.size(); ++k) {
      const auto& field = rec.fields[k];
      const auto& col = table.columns[k];
      std::string loc = table.file + ":" + std::to_string(rec.line) + ":" + col.column_name;
      if (field.text.empty() && !field.quoted)
        throw Error(Errc::TypeMismatch, loc + ": null cell");
      auto v = parse_cell(field.text, col.value_type);
      if (!v)
        throw Error(Errc::TypeMismatch, loc + ": '" + field.text + "' is not " +
                                            std::string(type_name(col.value_type)));
      row.push_back(std::move(*v));
    }
    table.rows.push_back(std::move(row));
  }
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xff;
  h *= kFnvPrime;
}

}  // namespace

DataSource Catalog::directory_source(const fs::path& dir) {
  return [dir](const std::string& file) -> std::optional<std::string> {
    std::ifstream in(dir / file, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
}

Catalog Catalog::load(const fs::path& schema_file, const fs::path& data_dir) {
  std::ifstream in(schema_file);
  if (!in) throw Error(Errc::Io, "cannot open schema " + schema_file.string());
  json schema;
  try {
    schema = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedSchema, schema_file.string() + ": " + e.what());
  }
  return from_schema(schema, directory_source(data_dir));
}

Catalog Catalog::from_schema(const json& schema, const DataSource& data) {
  if (!schema.is_object() || !schema.contains("tables") || !schema["tables"].is_array())
    throw Error(Errc::MalformedSchema, "schema must be an object with a 'tables' array");
  std::vector<TableData> tables;
  for (const auto& t : schema["tables"]) {
    TableData table;
    table.name = require_string(t, "name", "table");
    table.file = t.contains("file") ? require_string(t, "file", table.name)
                                    : table.name + ".csv";
    if (!t.contains("columns") || !t["columns"].is_array())
      throw Error(Errc::MalformedSchema, table.name + ": missing 'columns' array");
    for (const auto& c : t["columns"]) {
      ColumnDef col;
      col.table_name = table.name;
      col.column_name = require_string(c, "name", table.name);
      std::string where = table.name + "." + col.column_name;
      auto type = parse_value_type(require_string(c, "type", where));
      if (!type) throw Error(Errc::MalformedSchema, where + ": unknown column type");
      col.value_type = *type;
      col.key = parse_key(c.contains("key") ? c["key"] : json(), where);
      table.columns.push_back(std::move(col));
    }
    tables.push_back(std::move(table));
  }
  // Schema-level checks run before touching data so that key errors are
  // reported even when files are missing.
  {
    std::set<std::string> seen;
    for (const auto& t : tables)
      for (const auto& c : t.columns)
        if (!seen.insert(c.qualified()).second)
          throw Error(Errc::DuplicateQualifiedColumn, c.qualified());
  }
  for (auto& table : tables) {
    auto text = data(table.file);
    if (!text) throw Error(Errc::MissingTableFile, table.file + " (table " + table.name + ")");
    load_rows(table, *text);
  }
  return build(std::move(tables));
}

Catalog Catalog::build(std::vector<TableData> tables) {
  Catalog cat;
  cat.tables_ = std::move(tables);
  cat.index_all();
  return cat;
}

void Catalog::index_all() {
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    const auto& table = tables_[t];
    if (!table_index_.emplace(table.name, TableId(t)).second)
      throw Error(Errc::MalformedSchema, "duplicate table " + table.name);
    table_columns_.emplace_back();
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      const auto& col = table.columns[k];
      if (col.table_name != table.name)
        throw Error(Errc::MalformedSchema, col.qualified() + " declared under " + table.name);
      ColumnId id{static_cast<std::int32_t>(columns_.size())};
      if (!column_index_.emplace(col.qualified(), id).second)
        throw Error(Errc::DuplicateQualifiedColumn, col.qualified());
      columns_.push_back(col);
      column_table_.push_back(TableId(t));
      table_columns_.back().push_back(id);
      std::vector<Value> vals;
      vals.reserve(table.rows.size());
      for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
          throw Error(Errc::TypeMismatch, table.name + ": ragged row");
        if (type_of(row[k]) != col.value_type)
          throw Error(Errc::TypeMismatch, col.qualified() + ": cell of wrong type");
        vals.push_back(row[k]);
      }
      column_values_.push_back(std::move(vals));
    }
  }
  adjacency_.resize(tables_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& col = columns_[c];
    if (col.key.kind != KeyKind::Foreign) continue;
    auto target = find_column(col.key.target);
    if (!target || index(*target) == c || column(*target).key.kind == KeyKind::None)
      throw Error(Errc::DanglingKeyReference, col.qualified() + " -> " + col.key.target);
    ColumnId from{static_cast<std::int32_t>(c)};
    edges_.push_back({from, *target});
    TableId ta = table_of(from);
    TableId tb = table_of(*target);
    adjacency_[index(ta)].push_back({from, *target, tb});
    adjacency_[index(tb)].push_back({*target, from, ta});
  }
}

std::optional<TableId> Catalog::find_table(std::string_view name) const {
  auto it = table_index_.find(std::string(name));
  if (it == table_index_.end()) return std::nullopt;
  return it->second;
}

TableId Catalog::require_table(std::string_view name) const {
  auto t = find_table(name);
  if (!t) throw Error(Errc::UnknownTable, std::string(name));
  return *t;
}

std::span<const ColumnId> Catalog::columns_of(TableId t) const {
  return table_columns_.at(index(t));
}

std::span<const Value> Catalog::values(ColumnId c) const {
  return column_values_.at(index(c));
}

std::optional<ColumnId> Catalog::find_column(std::string_view qualified) const {
  auto it = column_index_.find(std::string(qualified));
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ColumnId> Catalog::columns_named(std::string_view name) const {
  std::vector<ColumnId> out;
  for (std::size_t c = 0; c < columns_.size(); ++c)
    if (columns_[c].column_name == name) out.push_back(ColumnId(static_cast<std::int32_t>(c)));
  return out;
}

std::span<const OrientedEdge> Catalog::edges_from(TableId t) const {
  return adjacency_.at(index(t));
}

bool Catalog::is_join_edge(ColumnId a, ColumnId b) const {
  for (const auto& e : adjacency_.at(index(table_of(a))))
    if (e.here == a && e.there == b) return true;
  return false;
}

Preview Catalog::preview(std::string_view table, std::size_t k) const {
  const auto& t = this->table(require_table(table));
  Preview p;
  for (const auto& c : t.columns) p.headers.push_back(c.column_name);
  std::size_t n = std::min(k, t.rows.size());
  p.rows.assign(t.rows.begin(), t.rows.begin() + static_cast<std::ptrdiff_t>(n));
  return p;
}

std::vector<JoinCandidate> Catalog::join_candidates(std::string_view table) const {
  TableId t = require_table(table);
  std::vector<JoinCandidate> out;
  for (const auto& e : edges_from(t)) {
    JoinCandidate jc{column(e.here).qualified(), column(e.there).qualified(),
                     this->table(e.there_table).name};
    if (std::find(out.begin(), out.end(), jc) == out.end()) out.push_back(std::move(jc));
  }
  return out;
}

json Catalog::schema_json() const {
  json tables = json::array();
  for (const auto& t : tables_) {
    json cols = json::array();
    for (const auto& c : t.columns)
      cols.push_back({{"name", c.column_name},
                      {"type", std::string(type_name(c.value_type))},
                      {"key", key_json(c.key)}});
    tables.push_back({{"name", t.name}, {"file", t.file}, {"columns", cols}});
  }
  return json{{"tables", tables}};
}

std::string Catalog::table_csv(TableId t) const {
  const auto& data = table(t);
  std::ostringstream out;
  std::vector<std::string> header;
  for (const auto& c : data.columns) header.push_back(c.column_name);
  csv::write_record(out, header);
  for (const auto& row : data.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(format_value(v));
    csv::write_record(out, cells);
  }
  return out.str();
}

void Catalog::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + file.string());
    out << text;
  };
  write(dir / "schema.json", schema_json().dump(2) + "\n");
  for (std::size_t i = 0; i < tables_.size(); ++i)
    write(dir / tables_[i].file, table_csv(TableId{static_cast<std::int32_t>(i)}));
}

std::uint64_t Catalog::fingerprint() const {
  std::uint64_t h = kFnvOffset;
  fnv(h, schema_json().dump());
  for (const auto& t : tables_)
    for (const auto& row : t.rows)
      for (const auto& v : row) fnv(h, format_literal(v));
  return h;
}

}  // namespace sqlsketch

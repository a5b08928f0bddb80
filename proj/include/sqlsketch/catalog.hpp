#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sqlsketch/value.hpp"

namespace sqlsketch {

enum class TableId : std::int32_t {};
enum class ColumnId : std::int32_t {};

constexpr std::size_t index(TableId t) noexcept { return static_cast<std::size_t>(t); }
constexpr std::size_t index(ColumnId c) noexcept { return static_cast<std::size_t>(c); }

enum class KeyKind { None, Primary, Foreign };

struct KeyRole {
  KeyKind kind = KeyKind::None;
  std::string target;  // "table.column" when kind == Foreign

  bool operator==(const KeyRole&) const = default;
};

struct ColumnDef {
  std::string table_name;
  std::string column_name;
  ValueType value_type = ValueType::Int;
  KeyRole key;

  std::string qualified() const { return table_name + "." + column_name; }
  bool operator==(const ColumnDef&) const = default;
};

struct TableData {
  std::string name;
  std::string file;
  std::vector<ColumnDef> columns;
  std::vector<std::vector<Value>> rows;

  bool operator==(const TableData&) const = default;
};

/// Unordered join-eligible pair; `from` holds the declared foreign key and
/// `to` the column it references.
struct JoinEdge {
  ColumnId from;
  ColumnId to;
};

/// One direction of a JoinEdge as seen from a table.
struct OrientedEdge {
  ColumnId here;
  ColumnId there;
  TableId there_table;
};

struct JoinCandidate {
  std::string left_column;   // qualified
  std::string right_column;  // qualified
  std::string right_table;

  bool operator==(const JoinCandidate&) const = default;
};

struct Preview {
  std::vector<std::string> headers;
  std::vector<std::vector<Value>> rows;
};

/// Returns the contents of a data file named in the schema, or nullopt when
/// it does not exist.
using DataSource = std::function<std::optional<std::string>(const std::string& file)>;

/// Immutable database: typed tables, key declarations and the derived join
/// graph. Safe to share read-only between threads.
class Catalog {
 public:
  Catalog() = default;

  static Catalog load(const std::filesystem::path& schema_file,
                      const std::filesystem::path& data_dir);
  static Catalog from_schema(const nlohmann::json& schema, const DataSource& data);
  static DataSource directory_source(const std::filesystem::path& dir);
  /// Validates and indexes already-typed tables.
  static Catalog build(std::vector<TableData> tables);

  std::size_t table_count() const noexcept { return tables_.size(); }
  std::size_t column_count() const noexcept { return columns_.size(); }

  const std::vector<TableData>& tables() const noexcept { return tables_; }
  const TableData& table(TableId t) const { return tables_.at(index(t)); }
  std::optional<TableId> find_table(std::string_view name) const;
  TableId require_table(std::string_view name) const;

  const ColumnDef& column(ColumnId c) const { return columns_.at(index(c)); }
  TableId table_of(ColumnId c) const { return column_table_.at(index(c)); }
  std::span<const ColumnId> columns_of(TableId t) const;
  std::span<const Value> values(ColumnId c) const;

  /// Exact lookup of "table.column".
  std::optional<ColumnId> find_column(std::string_view qualified) const;
  /// All columns whose bare name is `name`.
  std::vector<ColumnId> columns_named(std::string_view name) const;

  const std::vector<JoinEdge>& join_graph() const noexcept { return edges_; }
  std::span<const OrientedEdge> edges_from(TableId t) const;
  bool is_join_edge(ColumnId a, ColumnId b) const;

  Preview preview(std::string_view table, std::size_t k) const;
  std::vector<JoinCandidate> join_candidates(std::string_view table) const;

  nlohmann::json schema_json() const;
  /// The table's rows as CSV text with a header line.
  std::string table_csv(TableId t) const;
  /// Writes schema.json and one CSV per table into `dir`.
  void save(const std::filesystem::path& dir) const;
  /// Content hash over schema and rows (FNV-1a), stable across runs.
  std::uint64_t fingerprint() const;

  bool operator==(const Catalog& other) const { return tables_ == other.tables_; }

 private:
  void index_all();

  std::vector<TableData> tables_;
  std::vector<ColumnDef> columns_;
  std::vector<TableId> column_table_;
  std::vector<std::vector<ColumnId>> table_columns_;
  std::vector<std::vector<Value>> column_values_;
  std::unordered_map<std::string, TableId> table_index_;
  std::unordered_map<std::string, ColumnId> column_index_;
  std::vector<JoinEdge> edges_;
  std::vector<std::vector<OrientedEdge>> adjacency_;
};

}  // namespace sqlsketch

#include "sqlsketch/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/model.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kTableNames[] = {"authors", "papers",  "venues",  "cities",   "teams",
                                   "players", "orders",  "stores",  "products", "clients",
                                   "courses", "rooms",   "doctors", "patients", "flights",
                                   "airports"};

const char* const kColumnNames[] = {"label", "score", "title", "rank",  "weight", "code",
                                    "level", "price", "note",  "count", "ratio",  "tag"};

const char* const kWords[] = {
    "amber",  "birch",  "cedar",  "dune",   "ember",  "fjord",  "grove",  "harbor", "iris",
    "jade",   "kelp",   "lagoon", "maple",  "nectar", "onyx",   "pebble", "quartz", "reef",
    "sage",   "tundra", "umber",  "violet", "willow", "xenon",  "yarrow", "zephyr", "acorn",
    "basalt", "coral",  "delta",  "egret",  "flint",  "garnet", "heron",  "indigo", "juniper",
    "krill",  "lichen", "marsh",  "nimbus", "opal",   "prairie", "quill", "raven",  "slate",
    "thistle", "ursa",  "vale",   "wren",   "yew"};

constexpr std::size_t kWordCount = sizeof(kWords) / sizeof(kWords[0]);

struct Gen {
  Rng rng;
  std::size_t pick(std::size_t n) { return uniform_index(rng, n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + pick(hi - lo + 1); }
  bool coin() { return unit_uniform(rng) < 0.5; }
};

struct DataColumn {
  ValueType type;
  std::int64_t lo = 0;  // numeric range
  std::int64_t hi = 0;
  std::vector<std::string> vocab;  // strings
};

ColumnRef ref_of(const Catalog& c, ColumnId id) {
  const auto& d = c.column(id);
  return {d.table_name, d.column_name};
}

}  // namespace

SyntheticCase generate_case(std::uint64_t seed, const SyntheticOptions& opts) {
  Gen g{Rng(splitmix64(seed))};
  std::size_t n = g.between(opts.min_tables, opts.max_tables);

  std::vector<std::string> names(std::begin(kTableNames), std::end(kTableNames));
  for (std::size_t i = 0; i < n; ++i) std::swap(names[i], names[i + g.pick(names.size() - i)]);
  names.resize(n);

  std::vector<std::string> words(std::begin(kWords), std::end(kWords));
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    std::swap(words[i], words[i + g.pick(words.size() - i)]);
  std::size_t next_word = 0;
  std::int64_t next_range = 100;

  std::vector<TableData> tables(n);
  std::vector<std::vector<DataColumn>> data_cols(n);
  std::vector<std::size_t> parent(n, 0);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    TableData& t = tables[i];
    t.name = names[i];
    t.file = t.name + ".csv";
    rows[i] = g.between(opts.min_rows, opts.max_rows);
    t.columns.push_back({t.name, t.name + "_id", ValueType::Int, {KeyKind::Primary, {}}});
    if (i > 0) {
      parent[i] = g.pick(i);
      const std::string& p = names[parent[i]];
      t.columns.push_back({t.name, p + "_id", ValueType::Int, {KeyKind::Foreign, p + "." + p + "_id"}});
    }
    std::size_t ncols = std::min(g.between(opts.min_columns, opts.max_columns),
                                  std::size(kColumnNames));
    std::vector<std::size_t> cn(std::size(kColumnNames));
    for (std::size_t k = 0; k < cn.size(); ++k) cn[k] = k;
    for (std::size_t k = 0; k < ncols; ++k) std::swap(cn[k], cn[k + g.pick(cn.size() - k)]);
    for (std::size_t k = 0; k < ncols; ++k) {
      DataColumn dc;
      switch (g.pick(3)) {
        case 0: dc.type = ValueType::Int; break;
        case 1: dc.type = ValueType::Float; break;
        default: dc.type = ValueType::String; break;
      }
      if (dc.type == ValueType::String && next_word + 3 <= kWordCount) {
        for (int w = 0; w < 3; ++w) dc.vocab.push_back(words[next_word++]);
      } else if (dc.type == ValueType::String) {
        dc.type = ValueType::Int;
      }
      if (dc.type != ValueType::String) {
        dc.lo = next_range;
        dc.hi = next_range + 99;
        next_range += 1000;
      }
      t.columns.push_back({t.name, kColumnNames[cn[k]], dc.type, {}});
      data_cols[i].push_back(std::move(dc));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    TableData& t = tables[i];
    for (std::size_t r = 0; r < rows[i]; ++r) {
      std::vector<Value> row;
      row.emplace_back(static_cast<std::int64_t>(r));
      if (i > 0) row.emplace_back(static_cast<std::int64_t>(g.pick(rows[parent[i]])));
      for (const auto& dc : data_cols[i]) {
        std::int64_t x = dc.lo + static_cast<std::int64_t>(g.pick(static_cast<std::size_t>(dc.hi - dc.lo + 1)));
        switch (dc.type) {
          case ValueType::Int: row.emplace_back(x); break;
          case ValueType::Float: row.emplace_back(static_cast<double>(x) + 0.25 * static_cast<double>(g.pick(4))); break;
          case ValueType::String:
            row.emplace_back(dc.vocab[g.pick(dc.vocab.size())] + " " + std::to_string(r));
            break;
        }
      }
      t.rows.push_back(std::move(row));
    }
  }
  auto catalog = std::make_shared<Catalog>(Catalog::build(tables));

  // Planted join chain: a path through the key tree.
  std::size_t want = g.between(1, std::max<std::size_t>(1, opts.max_chain));
  std::vector<TableId> chain{TableId{static_cast<std::int32_t>(g.pick(n))}};
  std::vector<KeyPair> keys;
  while (chain.size() < want) {
    std::vector<OrientedEdge> options;
    for (const auto& e : catalog->edges_from(chain.back()))
      if (std::find(chain.begin(), chain.end(), e.there_table) == chain.end()) options.push_back(e);
    if (options.empty()) break;
    const auto& e = options[g.pick(options.size())];
    keys.push_back({e.here, e.there});
    chain.push_back(e.there_table);
  }

  // Hole columns come from the data columns of the chain.
  std::vector<std::pair<std::size_t, std::size_t>> pool;  // (table, data column)
  for (TableId t : chain)
    for (std::size_t k = 0; k < data_cols[index(t)].size(); ++k) pool.push_back({index(t), k});
  auto column_id = [&](std::pair<std::size_t, std::size_t> pc) {
    const auto& t = tables[pc.first];
    std::size_t offset = pc.first > 0 ? 2 : 1;
    return *catalog->find_column(t.name + "." + t.columns[offset + pc.second].column_name);
  };
  auto proj = pool[g.pick(pool.size())];
  auto where = pool[g.pick(pool.size())];
  if (pool.size() > 1)
    while (where == proj) where = pool[g.pick(pool.size())];
  ColumnId proj_id = column_id(proj), where_id = column_id(where);
  const DataColumn& wdc = data_cols[where.first][where.second];

  const auto cells = catalog->values(where_id);
  const Value& probe = cells[g.pick(cells.size())];
  RelOp op = RelOp::Eq;
  if (wdc.type != ValueType::String) op = g.coin() ? RelOp::Ge : RelOp::Le;

  auto soft_for = [&](std::pair<std::size_t, std::size_t> pc, const Hole& hole,
                      SoftConstraint& out) {
    const DataColumn& dc = data_cols[pc.first][pc.second];
    if (dc.type == ValueType::String) {
      const std::string& word = dc.vocab[g.pick(dc.vocab.size())];
      out.conjuncts.push_back({SoftOp::Contains, hole, Value(".*" + word + ".*"), true});
      return;
    }
    Value lo = dc.type == ValueType::Int ? Value(dc.lo) : Value(static_cast<double>(dc.lo));
    Value hi = dc.type == ValueType::Int ? Value(dc.hi + 1)
                                         : Value(static_cast<double>(dc.hi + 1));
    out.conjuncts.push_back({SoftOp::AtLeast, hole, lo, false});
    out.conjuncts.push_back({SoftOp::AtMost, hole, hi, false});
  };

  SketchAst sketch;
  Hole ph{"c_proj", HoleKind::Column};
  Hole wh{"c_where", HoleKind::Column};
  sketch.projection.push_back(ph);
  sketch.where = Predicate::compare({wh, op, probe});
  SoftConstraint soft;
  soft_for(proj, ph, soft);
  if (where != proj) soft_for(where, wh, soft);
  sketch.from.links.push_back({Hole{"t", HoleKind::Table}, soft});

  TableExpr fill;
  for (TableId t : chain) fill.links.push_back({catalog->table(t).name, {}});
  for (const auto& k : keys) fill.joins.push_back({ref_of(*catalog, k.left), ref_of(*catalog, k.right)});
  ProductionSeq seq;
  seq.fills.push_back({"c_proj", HoleKind::Column, ref_of(*catalog, proj_id)});
  seq.fills.push_back({"c_where", HoleKind::Column, ref_of(*catalog, where_id)});
  seq.fills.push_back({"t", HoleKind::Table, fill});

  SyntheticCase out;
  out.name = "case-" + std::to_string(seed);
  out.catalog = catalog;
  out.truth = apply_refinement(sketch, seq);
  out.sketch = std::move(sketch);
  return out;
}

ManifestEntry write_case(const SyntheticCase& c, const fs::path& dir) {
  fs::create_directories(dir);
  c.catalog->save(dir);
  auto write = [](const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + file.string());
    out << text << '\n';
  };
  write(dir / "sketch.sql", print_sketch(c.sketch));
  write(dir / "truth.sql", print_sketch(c.truth));
  return {c.name, dir / "schema.json", dir, dir / "sketch.sql", dir / "truth.sql"};
}

std::vector<ManifestEntry> write_suite(const fs::path& dir, std::size_t count, std::uint64_t seed,
                                       const SyntheticOptions& opts) {
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticCase c = generate_case(splitmix64(seed + i), opts);
    c.name = "case" + std::to_string(i);
    auto e = write_case(c, dir / c.name);
    e.schema = fs::path(c.name) / "schema.json";
    e.data = fs::path(c.name);
    e.sketch = fs::path(c.name) / "sketch.sql";
    e.ground_truth = fs::path(c.name) / "truth.sql";
    entries.push_back(std::move(e));
  }
  write_manifest(dir / "manifest.json", entries);
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::Io, "cannot read " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedSchema, file.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error(Errc::MalformedSchema, file.string() + ": expected a JSON list");
  fs::path base = file.parent_path();
  auto resolve = [&](const json& e, const char* key) {
    if (!e.contains(key) || !e[key].is_string())
      throw Error(Errc::MalformedSchema, file.string() + ": entry without '" + key + "'");
    fs::path p = e[key].get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    ManifestEntry m;
    m.name = e.contains("name") && e["name"].is_string() ? e["name"].get<std::string>()
                                                         : "case" + std::to_string(i);
    m.schema = resolve(e, "schema");
    m.data = resolve(e, "data");
    m.sketch = resolve(e, "sketch");
    m.ground_truth = resolve(e, "ground_truth");
    out.push_back(std::move(m));
  }
  return out;
}

void write_manifest(const fs::path& file, const std::vector<ManifestEntry>& entries) {
  json j = json::array();
  for (const auto& e : entries)
    j.push_back({{"name", e.name},
                 {"schema", e.schema.generic_string()},
                 {"data", e.data.generic_string()},
                 {"sketch", e.sketch.generic_string()},
                 {"ground_truth", e.ground_truth.generic_string()}});
  std::ofstream out(file);
  if (!out) throw Error(Errc::Io, "cannot write " + file.string());
  out << j.dump(2) << '\n';
}

}  // namespace sqlsketch

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"
#include "sqlsketch/softsem.hpp"
#include "sqlsketch/typing.hpp"

namespace sqlsketch {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(Rng& rng);
/// Uniform index in [0, n); n > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);
std::uint64_t splitmix64(std::uint64_t x);

/// The value of the table hole: a path through the join graph.
struct ChainFill {
  std::vector<TableId> tables;
  std::vector<KeyPair> keys;         // keys[i] joins tables[i] and tables[i + 1]
  std::optional<KeyPair> entering;   // edge from the sketch's last fixed table

  bool operator==(const ChainFill&) const = default;
};

/// One value per free column hole plus the table hole's chain.
struct Assignment {
  std::vector<ColumnId> columns;  // parallel to SketchShape::column_vars
  ChainFill chain;

  bool operator==(const Assignment&) const = default;
};

/// A sketch compiled against a catalog and theta table so that scoring an
/// assignment touches only integer ids. score() equals score_completion()
/// on materialize() of the same assignment.
class SketchModel {
 public:
  SketchModel(const SketchAst& sketch, const Catalog& catalog, const ThetaTable& theta,
              double lambda, std::size_t max_join_depth);

  const SketchShape& shape() const noexcept { return shape_; }
  const Catalog& catalog() const noexcept { return catalog_; }
  bool has_table_var() const noexcept { return shape_.table_var.has_value(); }
  std::size_t var_count() const noexcept {
    return shape_.column_vars.size() + (has_table_var() ? 1 : 0);
  }

  double score(const Assignment& a) const;
  SketchAst materialize(const Assignment& a) const;

  /// Draws a chain from the uniform grammar: first table uniform (or an
  /// entering edge uniform), then stop with probability 1/2 or extend along
  /// a uniformly chosen edge to a table not yet in the chain. Throws
  /// NoValidExpansion when no chain fits.
  ChainFill propose_chain(Rng& rng) const;
  /// log q(chain) under propose_chain.
  double chain_log_density(const ChainFill& chain) const;
  /// Uniform column from the var's domain; throws NoValidExpansion.
  ColumnId propose_column(std::size_t var, Rng& rng) const;

  /// Every chain propose_chain can return (for small catalogs and tests).
  std::vector<ChainFill> enumerate_chains() const;

 private:
  enum class SlotKind { Const, Var, BoundLeft, BoundRight, Missing };
  struct Slot {
    SlotKind kind = SlotKind::Missing;
    std::size_t var = 0;
    ColumnId id{};
  };
  enum class Scope { Suffix, Flat, Projection };
  struct Prim {
    Slot slot;
    const std::vector<double>* theta = nullptr;
    std::size_t suffix = 0;
  };
  struct Block {
    Scope scope = Scope::Flat;
    std::vector<Prim> prims;
  };
  struct Compare {
    Slot slot;
    ValueType type = ValueType::Int;
  };
  struct Join {
    Slot left;
    Slot right;
  };

  Slot compile_slot(const ColumnSlot& s) const;
  std::optional<ColumnId> resolve(const Slot& s, const Assignment& a) const;
  std::size_t chain_options(const std::vector<TableId>& tables, std::size_t fill_len,
                            std::vector<OrientedEdge>* out) const;
  void extend_all(ChainFill& fill, std::vector<ChainFill>& out) const;

  SketchAst sketch_;
  const Catalog& catalog_;
  double lambda_ = 0;
  std::size_t max_depth_ = 0;
  SketchShape shape_;
  std::optional<std::size_t> tail_index_;
  std::vector<TableId> prefix_;
  std::vector<Join> joins_;  // joins between prefix tables and the entering join
  std::vector<Compare> compares_;
  std::vector<Slot> projection_;
  std::vector<Block> blocks_;
  std::vector<double> size_by_fill_len_;
};

}  // namespace sqlsketch

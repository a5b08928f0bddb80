#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"
#include "sqlsketch/model.hpp"
#include "sqlsketch/softsem.hpp"

namespace sqlsketch {

struct SamplerConfig {
  std::size_t sample_count = 100;
  std::size_t mh_steps = 1000;
  std::size_t max_join_depth = 6;  // tables in the whole chain
  std::size_t rejection_retry_limit = 10000;  // reruns per sample
  std::uint64_t seed = 0;

  /// Throws InvalidConfig unless every count is positive.
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults.
  static SamplerConfig from_json(const nlohmann::json& j);

  bool operator==(const SamplerConfig&) const = default;
};

struct SampleSet {
  std::vector<Completion> samples;
  std::size_t reruns = 0;  // chains discarded by the final check
};

/// A fresh value for one hole drawn from the uniform grammar.
std::variant<ColumnRef, TableExpr> sample_hole_expression(const SketchModel& model,
                                                          const std::string& hole, Rng& rng);

/// Runs one Metropolis-Hastings chain from an independent initial draw and
/// returns its final state. Each step redraws one hole name chosen
/// uniformly and accepts with the Hastings ratio.
Assignment run_chain(const SketchModel& model, Rng& rng, std::size_t steps);

/// sample_count chains, each rerun while its final state has zero weight or
/// refines a rejected question. Chain i uses its own generator seeded from
/// (seed, i). A hole-free sketch yields itself.
SampleSet mh_sample(const SketchAst& p, const ThetaTable& theta, const Catalog& catalog,
                    const std::vector<SketchAst>& negatives, const SamplerConfig& cfg,
                    double lambda = 0);

}  // namespace sqlsketch

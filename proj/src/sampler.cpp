#include "sqlsketch/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

namespace {

std::size_t count_field(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
    throw Error(Errc::InvalidConfig, std::string(key) + " must be a positive integer");
  return v.get<std::size_t>();
}

ColumnRef ref(const Catalog& catalog, ColumnId c) {
  const auto& def = catalog.column(c);
  return {def.table_name, def.column_name};
}

}  // namespace

void SamplerConfig::validate() const {
  if (sample_count == 0 || mh_steps == 0 || max_join_depth == 0 || rejection_retry_limit == 0)
    throw Error(Errc::InvalidConfig, "sampler counts must be positive");
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"sample_count", sample_count},
          {"mh_steps", mh_steps},
          {"max_join_depth", max_join_depth},
          {"rejection_retry_limit", rejection_retry_limit},
          {"seed", seed}};
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "sampler config must be an object");
  c.sample_count = count_field(j, "sample_count", c.sample_count);
  c.mh_steps = count_field(j, "mh_steps", c.mh_steps);
  c.max_join_depth = count_field(j, "max_join_depth", c.max_join_depth);
  c.rejection_retry_limit = count_field(j, "rejection_retry_limit", c.rejection_retry_limit);
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer()) throw Error(Errc::InvalidConfig, "seed must be an integer");
    c.seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(s.get<std::int64_t>());
  }
  return c;
}

std::variant<ColumnRef, TableExpr> sample_hole_expression(const SketchModel& model,
                                                          const std::string& hole, Rng& rng) {
  const auto& shape = model.shape();
  const Catalog& catalog = model.catalog();
  if (shape.table_var && *shape.table_var == hole) {
    ChainFill f = model.propose_chain(rng);
    TableExpr e;
    for (TableId t : f.tables) e.links.push_back({catalog.table(t).name, {}});
    for (const auto& k : f.keys) e.joins.push_back({ref(catalog, k.left), ref(catalog, k.right)});
    return e;
  }
  auto it = std::find(shape.column_vars.begin(), shape.column_vars.end(), hole);
  if (it == shape.column_vars.end()) throw Error(Errc::NoSuchHole, hole);
  auto var = static_cast<std::size_t>(it - shape.column_vars.begin());
  return ref(catalog, model.propose_column(var, rng));
}

Assignment run_chain(const SketchModel& model, Rng& rng, std::size_t steps) {
  const auto& shape = model.shape();
  std::size_t ncols = shape.column_vars.size();
  Assignment cur;
  for (std::size_t i = 0; i < ncols; ++i) cur.columns.push_back(model.propose_column(i, rng));
  double cur_lq = 0;
  if (model.has_table_var()) {
    cur.chain = model.propose_chain(rng);
    cur_lq = model.chain_log_density(cur.chain);
  }
  double cur_score = model.score(cur);
  std::size_t nvars = model.var_count();
  if (nvars == 0) return cur;

  Assignment next = cur;
  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t v = uniform_index(rng, nvars);
    double log_ratio = 0;
    double next_lq = cur_lq;
    if (v < ncols) {
      next.columns[v] = model.propose_column(v, rng);
    } else {
      next.chain = model.propose_chain(rng);
      next_lq = model.chain_log_density(next.chain);
      log_ratio = cur_lq - next_lq;
    }
    double next_score = model.score(next);
    bool accept;
    if (cur_score == kNegInf) {
      accept = true;
    } else if (next_score == kNegInf) {
      accept = false;
    } else {
      log_ratio += next_score - cur_score;
      accept = log_ratio >= 0 || unit_uniform(rng) < std::exp(log_ratio);
    }
    if (accept) {
      cur = next;
      cur_score = next_score;
      cur_lq = next_lq;
    } else {
      next = cur;
    }
  }
  return cur;
}

SampleSet mh_sample(const SketchAst& p, const ThetaTable& theta, const Catalog& catalog,
                    const std::vector<SketchAst>& negatives, const SamplerConfig& cfg,
                    double lambda) {
  cfg.validate();
  SampleSet out;
  if (is_complete(p)) {
    out.samples.push_back(p);
    return out;
  }
  SketchModel model(p, catalog, theta, lambda, cfg.max_join_depth);
  for (std::size_t i = 0; i < cfg.sample_count; ++i) {
    Rng rng(splitmix64(cfg.seed ^ splitmix64(i + 1)));
    std::size_t attempts = 0;
    for (;;) {
      Assignment a = run_chain(model, rng, cfg.mh_steps);
      if (model.score(a) != kNegInf) {
        SketchAst s = model.materialize(a);
        bool excluded = std::any_of(negatives.begin(), negatives.end(),
                                    [&](const SketchAst& n) { return matches(n, s); });
        if (!excluded) {
          out.samples.push_back(std::move(s));
          break;
        }
      }
      ++out.reruns;
      if (++attempts >= cfg.rejection_retry_limit) {
        std::string detail = "no acceptable completion after " + std::to_string(attempts) +
                             " chains; rejected questions:";
        for (const auto& n : negatives) detail += "\n" + print_sketch(n);
        throw Error(Errc::RejectionExhausted, detail);
      }
    }
  }
  return out;
}

}  // namespace sqlsketch

#include "sqlsketch/questions.hpp"

#include <algorithm>
#include <set>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"
#include "sqlsketch/typing.hpp"

namespace sqlsketch {

namespace {

ColumnRef ref(const Catalog& catalog, ColumnId c) {
  const auto& def = catalog.column(c);
  return {def.table_name, def.column_name};
}

class Builder {
 public:
  Builder(const SketchAst& p, const Catalog& catalog, const std::vector<SketchAst>& negatives)
      : p_(p), catalog_(catalog), negatives_(negatives) {
    used_ = hole_names(p);
    for (const auto& n : negatives) {
      auto names = hole_names(n);
      used_.insert(names.begin(), names.end());
    }
  }

  void add(ProductionSeq seq, std::vector<std::string> previews) {
    SketchAst result = apply_refinement(p_, seq);
    for (const auto& n : negatives_)
      if (matches(n, result)) return;
    std::string key = print_sketch(result);
    if (!seen_.insert(key).second) return;
    out_.push_back({std::move(seq), std::move(result), std::move(previews)});
  }

  std::string fresh_table() {
    std::string n = fresh_name("t_new", used_, true);
    used_.insert(n);
    return n;
  }
  std::string fresh_column() {
    std::string n = fresh_name("c_new", used_);
    used_.insert(n);
    return n;
  }
  void release(const std::vector<std::string>& names) {
    for (const auto& n : names) used_.erase(n);
  }

  std::vector<Question> take() { return std::move(out_); }

 private:
  const SketchAst& p_;
  const Catalog& catalog_;
  const std::vector<SketchAst>& negatives_;
  std::set<std::string> used_;
  std::set<std::string> seen_;
  std::vector<Question> out_;
};

TableExpr single(const std::string& table) {
  TableExpr e;
  e.links.push_back({table, {}});
  return e;
}

// table |x|_{new, new} ??new
TableExpr open_join(const std::string& table, Builder& b, std::vector<std::string>& names) {
  TableExpr e = single(table);
  std::string l = b.fresh_column();
  std::string r = b.fresh_column();
  std::string t = b.fresh_table();
  names.insert(names.end(), {l, r, t});
  e.joins.push_back({Hole{l, HoleKind::Column}, Hole{r, HoleKind::Column}});
  e.links.push_back({Hole{t, HoleKind::Table}, {}});
  return e;
}

}  // namespace

std::vector<Question> candidate_questions(const SketchAst& p, const Catalog& catalog,
                                          const std::vector<SketchAst>& negatives,
                                          std::size_t max_join_depth) {
  SketchShape shape = analyze_sketch(p, catalog);
  Builder b(p, catalog, negatives);

  for (std::size_t v = 0; v < shape.column_vars.size(); ++v) {
    for (ColumnId c : shape.domains[v]) {
      ProductionSeq seq;
      seq.fills.push_back({shape.column_vars[v], HoleKind::Column, ref(catalog, c)});
      b.add(std::move(seq), {catalog.table(catalog.table_of(c)).name});
    }
  }

  if (shape.table_var) {
    const std::string& hole = *shape.table_var;
    std::size_t depth = shape.prefix.size();
    auto table_fill = [&](TableExpr e) {
      ProductionSeq seq;
      seq.fills.push_back({hole, HoleKind::Table, std::move(e)});
      return seq;
    };
    auto has_exit = [&](TableId from, std::initializer_list<TableId> taken) {
      for (const auto& e : catalog.edges_from(from)) {
        bool used = std::find(taken.begin(), taken.end(), e.there_table) != taken.end() ||
                    std::find(shape.prefix.begin(), shape.prefix.end(), e.there_table) !=
                        shape.prefix.end();
        if (!used) return true;
      }
      return false;
    };

    if (depth == 0) {
      for (std::size_t i = 0; i < catalog.table_count() && max_join_depth >= 1; ++i) {
        TableId t{static_cast<std::int32_t>(i)};
        const std::string& name = catalog.table(t).name;
        b.add(table_fill(single(name)), {name});
        if (max_join_depth >= 2 && has_exit(t, {t})) {
          std::vector<std::string> names;
          b.add(table_fill(open_join(name, b, names)), {name});
          b.release(names);
        }
        if (max_join_depth < 2) continue;
        for (const auto& e : catalog.edges_from(t)) {
          const std::string& other = catalog.table(e.there_table).name;
          TableExpr two = single(name);
          two.joins.push_back({ref(catalog, e.here), ref(catalog, e.there)});
          two.links.push_back({other, {}});
          b.add(table_fill(two), {name, other});
          if (max_join_depth >= 3 && has_exit(e.there_table, {t, e.there_table})) {
            std::vector<std::string> names;
            TableExpr three = two;
            std::string l = b.fresh_column(), r = b.fresh_column(), tn = b.fresh_table();
            names = {l, r, tn};
            three.joins.push_back({Hole{l, HoleKind::Column}, Hole{r, HoleKind::Column}});
            three.links.push_back({Hole{tn, HoleKind::Table}, {}});
            b.add(table_fill(std::move(three)), {name, other});
            b.release(names);
          }
        }
      }
    } else if (depth + 1 <= max_join_depth) {
      const std::string& last = catalog.table(shape.prefix.back()).name;
      for (const auto& e : shape.entering) {
        TableId there = catalog.table_of(e.right);
        const std::string& name = catalog.table(there).name;
        auto with_keys = [&](TableExpr fill) {
          ProductionSeq seq = table_fill(std::move(fill));
          if (shape.bound_left)
            seq.fills.push_back({*shape.bound_left, HoleKind::Column, ref(catalog, e.left)});
          if (shape.bound_right && shape.bound_right != shape.bound_left)
            seq.fills.push_back({*shape.bound_right, HoleKind::Column, ref(catalog, e.right)});
          return seq;
        };
        b.add(with_keys(single(name)), {last, name});
        if (depth + 2 <= max_join_depth && has_exit(there, {there})) {
          std::vector<std::string> names;
          b.add(with_keys(open_join(name, b, names)), {last, name});
          b.release(names);
        }
      }
    }
  }

  auto out = b.take();
  if (out.empty())
    throw Error(Errc::NoCandidates, "every refinement of the current sketch was rejected");
  return out;
}

std::vector<ScoredQuestion> estimate_scores(const std::vector<Question>& candidates,
                                            const std::vector<Completion>& samples) {
  if (samples.empty()) throw Error(Errc::InvalidConfig, "no samples to score questions with");
  std::vector<ScoredQuestion> out;
  for (const auto& q : candidates) {
    std::size_t hits = 0;
    for (const auto& s : samples)
      if (matches(q.result, s)) ++hits;
    if (hits == 0) continue;
    double pi = static_cast<double>(hits) / static_cast<double>(samples.size());
    out.push_back({q, pi, 2.0 * pi * (1.0 - pi)});
  }
  return out;
}

ScoredQuestion select_question(const std::vector<ScoredQuestion>& scored) {
  if (scored.empty()) throw Error(Errc::EmptyCandidateList, "no question has support");
  const ScoredQuestion* best = &scored.front();
  std::size_t best_size = size(best->question.result);
  std::string best_desc = best->question.seq.describe();
  for (std::size_t i = 1; i < scored.size(); ++i) {
    const auto& s = scored[i];
    if (s.score < best->score) continue;
    std::size_t sz = size(s.question.result);
    if (s.score == best->score) {
      if (sz > best_size) continue;
      if (sz == best_size) {
        std::string desc = s.question.seq.describe();
        if (desc >= best_desc) continue;
        best_desc = std::move(desc);
        best = &s;
        best_size = sz;
        continue;
      }
    }
    best = &s;
    best_size = sz;
    best_desc = s.question.seq.describe();
  }
  return *best;
}

}  // namespace sqlsketch

#pragma once

#include <string>
#include <vector>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

/// A one-hole refinement offered to the user.
struct Question {
  ProductionSeq seq;
  SketchAst result;  // apply_refinement(base, seq)
  /// Tables whose rows the user should see to answer: the owning table of
  /// a column, or every table a join question names.
  std::vector<std::string> preview_tables;

  bool operator==(const Question&) const = default;
};

struct ScoredQuestion {
  Question question;
  double pi_plus = 0;
  double score = 0;  // 2 * pi_plus * (1 - pi_plus)
};

/// Every candidate refinement of `p` that no rejected question covers:
/// a column constant per type-compatible column for each column hole, and
/// for the table hole a single table, a table joined to a fresh hole, a
/// key join of two tables, and a key join of two tables continued by a
/// fresh hole (forms that would exceed max_join_depth are left out). When
/// the table hole already follows fixed tables, the join columns leading
/// into it are filled together with its first table. Throws NoCandidates
/// when nothing is left.
std::vector<Question> candidate_questions(const SketchAst& p, const Catalog& catalog,
                                          const std::vector<SketchAst>& negatives,
                                          std::size_t max_join_depth);

/// pi_plus is the fraction of samples each question refines to; questions
/// no sample supports are dropped.
std::vector<ScoredQuestion> estimate_scores(const std::vector<Question>& candidates,
                                            const std::vector<Completion>& samples);

/// Highest score; ties go to the smaller resulting sketch, then to the
/// lexicographically smaller production description. Throws
/// EmptyCandidateList.
ScoredQuestion select_question(const std::vector<ScoredQuestion>& scored);

}  // namespace sqlsketch

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqlsketch/ast.hpp"
#include "sqlsketch/catalog.hpp"
#include "sqlsketch/error.hpp"
#include "sqlsketch/questions.hpp"
#include "sqlsketch/sampler.hpp"
#include "sqlsketch/softsem.hpp"

namespace sqlsketch {

struct SessionConfig {
  SamplerConfig sampler;
  double lambda = 0;  // weight of the completion size in its score

  nlohmann::json to_json() const;
  static SessionConfig from_json(const nlohmann::json& j);
  bool operator==(const SessionConfig&) const = default;
};

enum class SessionStatus { AwaitingAnswer, Complete, Failed };

std::string_view status_name(SessionStatus s) noexcept;

/// One line of the interaction trace.
struct TraceRecord {
  std::string sketch;    // before the answer
  std::string question;  // production summary
  bool answer = false;
  double pi_plus = 0;
  double score = 0;

  nlohmann::json to_json() const;
};

/// Something that answers questions; a person or a known target query.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual bool answer(const Question& q) = 0;
};

/// Accepts exactly the questions the target query refines.
class GroundTruthOracle : public Oracle {
 public:
  explicit GroundTruthOracle(Completion truth) : truth_(std::move(truth)) {}
  bool answer(const Question& q) override;

 private:
  Completion truth_;
};

/// The interactive loop: sample completions, pick the most informative
/// question, fold in the answer, repeat until no holes remain.
class Session {
 public:
  static Session start(std::shared_ptr<const Catalog> catalog, const std::string& sketch_text,
                       SessionConfig cfg);
  static Session start(std::shared_ptr<const Catalog> catalog, SketchAst sketch,
                       SessionConfig cfg);

  SessionStatus status() const noexcept { return state_.status; }
  const SketchAst& sketch() const noexcept { return state_.sketch; }
  const SketchAst& initial_sketch() const noexcept { return initial_; }
  const std::optional<ScoredQuestion>& pending() const noexcept { return state_.pending; }
  const std::vector<Question>& negatives() const noexcept { return state_.negatives; }
  /// Empty unless status() is Failed.
  const std::string& diagnostic() const noexcept { return state_.diagnostic; }
  std::optional<Errc> failure() const noexcept { return state_.failure; }
  const SessionConfig& config() const noexcept { return cfg_; }
  const Catalog& catalog() const noexcept { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const noexcept { return catalog_; }

  std::size_t iterations() const noexcept { return history_.size(); }
  std::size_t accepts() const noexcept;
  std::size_t rejects() const noexcept { return iterations() - accepts(); }
  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }

  /// Throws SessionComplete unless a question is pending.
  void answer(bool accept);
  /// Restores the state before the last answer exactly. Throws EmptyHistory.
  void undo();

  nlohmann::json to_json() const;
  static Session from_json(const nlohmann::json& j, std::shared_ptr<const Catalog> catalog);

  /// Sketch, negatives, pending question, status and sampler position.
  bool same_state(const Session& other) const;

 private:
  struct State {
    SketchAst sketch;
    std::vector<Question> negatives;
    std::optional<ScoredQuestion> pending;
    SessionStatus status = SessionStatus::AwaitingAnswer;
    std::string diagnostic;
    std::optional<Errc> failure;
    std::uint64_t draws = 0;  // sampler invocations so far

    bool operator==(const State& o) const;
  };
  struct Entry {
    State before;
    bool accepted = false;
  };

  Session() = default;
  void advance();

  std::shared_ptr<const Catalog> catalog_;
  SessionConfig cfg_;
  SketchAst initial_;
  ThetaTable theta_;
  State state_;
  std::vector<Entry> history_;
  std::vector<TraceRecord> trace_;
};

struct BatchLimits {
  std::size_t max_iterations = 0;          // 0 = unlimited
  std::chrono::duration<double> wall{0};   // 0 = unlimited
};

enum class BatchStatus { Complete, Failed, Timeout };

std::string_view batch_status_name(BatchStatus s) noexcept;

struct BatchResult {
  BatchStatus status = BatchStatus::Complete;
  std::optional<Completion> final;
  std::size_t iterations = 0;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  std::string diagnostic;
  std::vector<TraceRecord> trace;
};

/// Drives a session with GroundTruthOracle(truth). Throws
/// GroundTruthNotDerivable when `truth` is not a completion of `sketch`.
BatchResult run_batch(const SketchAst& sketch, std::shared_ptr<const Catalog> catalog,
                      const Completion& truth, const SessionConfig& cfg,
                      const BatchLimits& limits = {});

/// The minimum-work reference: without sampling, always asks the candidate
/// that refines `truth` and fills the most, so every answer is yes.
BatchResult run_perfect_oracle(const SketchAst& sketch, const Catalog& catalog,
                               const Completion& truth, std::size_t max_join_depth);

nlohmann::json question_to_json(const Question& q);
Question question_from_json(const nlohmann::json& j, const Catalog& catalog);

}  // namespace sqlsketch

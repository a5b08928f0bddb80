#include "sqlsketch/engine.hpp"

#include "sqlsketch/lang.hpp"
#include "sqlsketch/refine.hpp"

namespace sqlsketch {

namespace {

using nlohmann::json;

bool synthesis_failure(Errc c) {
  return c == Errc::NoValidExpansion || c == Errc::RejectionExhausted ||
         c == Errc::NoCandidates || c == Errc::EmptyCandidateList;
}

std::optional<Errc> errc_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Errc::Io); ++i)
    if (errc_name(static_cast<Errc>(i)) == name) return static_cast<Errc>(i);
  return std::nullopt;
}

SessionStatus status_from_name(const std::string& s) {
  if (s == "awaiting_answer") return SessionStatus::AwaitingAnswer;
  if (s == "complete") return SessionStatus::Complete;
  if (s == "failed") return SessionStatus::Failed;
  throw Error(Errc::InvalidConfig, "unknown session status '" + s + "'");
}

json scored_to_json(const std::optional<ScoredQuestion>& s) {
  if (!s) return nullptr;
  return {{"question", question_to_json(s->question)},
          {"pi_plus", s->pi_plus},
          {"score", s->score}};
}

std::optional<ScoredQuestion> scored_from_json(const json& j, const Catalog& catalog) {
  if (j.is_null()) return std::nullopt;
  return ScoredQuestion{question_from_json(j.at("question"), catalog),
                        j.at("pi_plus").get<double>(), j.at("score").get<double>()};
}

ColumnRef split_column(const std::string& q) {
  auto dot = q.find('.');
  if (dot == std::string::npos) throw Error(Errc::UnknownColumnConstant, q);
  return {q.substr(0, dot), q.substr(dot + 1)};
}

}  // namespace

json SessionConfig::to_json() const {
  json j = sampler.to_json();
  j["lambda"] = lambda;
  return j;
}

SessionConfig SessionConfig::from_json(const json& j) {
  SessionConfig c;
  c.sampler = SamplerConfig::from_json(j);
  if (j.contains("lambda")) {
    if (!j.at("lambda").is_number()) throw Error(Errc::InvalidConfig, "lambda must be a number");
    c.lambda = j.at("lambda").get<double>();
  }
  return c;
}

std::string_view status_name(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::AwaitingAnswer: return "awaiting_answer";
    case SessionStatus::Complete: return "complete";
    case SessionStatus::Failed: return "failed";
  }
  return "?";
}

std::string_view batch_status_name(BatchStatus s) noexcept {
  switch (s) {
    case BatchStatus::Complete: return "complete";
    case BatchStatus::Failed: return "failed";
    case BatchStatus::Timeout: return "timeout";
  }
  return "?";
}

json TraceRecord::to_json() const {
  return {{"sketch", sketch},
          {"question", question},
          {"answer", answer},
          {"pi_plus", pi_plus},
          {"score", score}};
}

bool GroundTruthOracle::answer(const Question& q) { return matches(q.result, truth_); }

json question_to_json(const Question& q) {
  json fills = json::array();
  for (const auto& f : q.seq.fills) {
    std::string value = std::holds_alternative<ColumnRef>(f.value)
                            ? std::get<ColumnRef>(f.value).qualified()
                            : print_table_expr(std::get<TableExpr>(f.value));
    fills.push_back({{"name", f.name}, {"kind", hole_kind_name(f.kind)}, {"value", value}});
  }
  return {{"summary", q.seq.describe()},
          {"fills", fills},
          {"result", print_sketch(q.result)},
          {"preview_tables", q.preview_tables}};
}

Question question_from_json(const json& j, const Catalog& catalog) {
  Question q;
  for (const auto& f : j.at("fills")) {
    HoleFill fill;
    fill.name = f.at("name").get<std::string>();
    std::string kind = f.at("kind").get<std::string>();
    std::string value = f.at("value").get<std::string>();
    if (kind == "column") {
      fill.kind = HoleKind::Column;
      fill.value = split_column(value);
    } else {
      fill.kind = HoleKind::Table;
      fill.value = parse_table_expr(value, catalog);
    }
    q.seq.fills.push_back(std::move(fill));
  }
  q.result = parse_sketch(j.at("result").get<std::string>(), catalog);
  q.preview_tables = j.at("preview_tables").get<std::vector<std::string>>();
  return q;
}

bool Session::State::operator==(const State& o) const {
  auto same_pending = [&] {
    if (pending.has_value() != o.pending.has_value()) return false;
    if (!pending) return true;
    return pending->question == o.pending->question && pending->pi_plus == o.pending->pi_plus &&
           pending->score == o.pending->score;
  };
  return sketch == o.sketch && negatives == o.negatives && same_pending() &&
         status == o.status && diagnostic == o.diagnostic && failure == o.failure &&
         draws == o.draws;
}

Session Session::start(std::shared_ptr<const Catalog> catalog, const std::string& sketch_text,
                       SessionConfig cfg) {
  SketchAst sketch = parse_sketch(sketch_text, *catalog);
  return start(std::move(catalog), std::move(sketch), std::move(cfg));
}

Session Session::start(std::shared_ptr<const Catalog> catalog, SketchAst sketch,
                       SessionConfig cfg) {
  cfg.sampler.validate();
  Session s;
  s.catalog_ = std::move(catalog);
  s.cfg_ = std::move(cfg);
  s.initial_ = sketch;
  s.theta_ = ThetaTable::precompute(sketch, *s.catalog_);
  s.state_.sketch = std::move(sketch);
  s.advance();
  return s;
}

std::size_t Session::accepts() const noexcept {
  std::size_t n = 0;
  for (const auto& e : history_) n += e.accepted ? 1 : 0;
  return n;
}

void Session::advance() {
  state_.pending.reset();
  if (is_complete(state_.sketch)) {
    state_.status = SessionStatus::Complete;
    return;
  }
  try {
    SamplerConfig sc = cfg_.sampler;
    sc.seed = splitmix64(cfg_.sampler.seed ^ splitmix64(0x5eed0000ULL + state_.draws));
    ++state_.draws;
    std::vector<SketchAst> negs;
    for (const auto& n : state_.negatives) negs.push_back(n.result);
    SampleSet samples = mh_sample(state_.sketch, theta_, *catalog_, negs, sc, cfg_.lambda);
    auto candidates = candidate_questions(state_.sketch, *catalog_, negs, sc.max_join_depth);
    state_.pending = select_question(estimate_scores(candidates, samples.samples));
    state_.status = SessionStatus::AwaitingAnswer;
  } catch (const Error& e) {
    if (!synthesis_failure(e.code())) throw;
    state_.status = SessionStatus::Failed;
    state_.failure = e.code();
    state_.diagnostic = e.what();
  }
}

void Session::answer(bool accept) {
  if (state_.status != SessionStatus::AwaitingAnswer || !state_.pending)
    throw Error(Errc::SessionComplete,
                "session is " + std::string(status_name(state_.status)) + ", not awaiting an answer");
  const ScoredQuestion asked = *state_.pending;
  history_.push_back({state_, accept});
  trace_.push_back({print_sketch(state_.sketch), asked.question.seq.describe(), accept,
                    asked.pi_plus, asked.score});
  if (accept) {
    state_.sketch = asked.question.result;
    auto names = hole_names(state_.sketch);
    std::erase_if(state_.negatives,
                  [&](const Question& n) { return !names.count(n.seq.target().name); });
  } else {
    state_.negatives.push_back(asked.question);
  }
  advance();
}

void Session::undo() {
  if (history_.empty()) throw Error(Errc::EmptyHistory, "nothing to undo");
  state_ = std::move(history_.back().before);
  history_.pop_back();
  trace_.pop_back();
}

bool Session::same_state(const Session& other) const { return state_ == other.state_; }

namespace {

json state_json(const std::string& sketch, const std::vector<Question>& negatives,
                const std::optional<ScoredQuestion>& pending, SessionStatus status,
                const std::string& diagnostic, std::optional<Errc> failure, std::uint64_t draws) {
  json negs = json::array();
  for (const auto& n : negatives) negs.push_back(question_to_json(n));
  return {{"sketch", sketch},
          {"negatives", negs},
          {"pending", scored_to_json(pending)},
          {"status", status_name(status)},
          {"diagnostic", diagnostic},
          {"failure", failure ? json(errc_name(*failure)) : json(nullptr)},
          {"draws", draws}};
}

}  // namespace

json Session::to_json() const {
  auto dump = [](const State& s) {
    return state_json(print_sketch(s.sketch), s.negatives, s.pending, s.status, s.diagnostic,
                      s.failure, s.draws);
  };
  json history = json::array();
  for (const auto& e : history_) history.push_back({{"before", dump(e.before)}, {"accepted", e.accepted}});
  json trace = json::array();
  for (const auto& t : trace_) trace.push_back(t.to_json());
  return {{"config", cfg_.to_json()},
          {"initial", print_sketch(initial_)},
          {"state", dump(state_)},
          {"history", history},
          {"trace", trace}};
}

Session Session::from_json(const json& j, std::shared_ptr<const Catalog> catalog) {
  try {
    Session s;
    s.catalog_ = std::move(catalog);
    s.cfg_ = SessionConfig::from_json(j.at("config"));
    s.initial_ = parse_sketch(j.at("initial").get<std::string>(), *s.catalog_);
    s.theta_ = ThetaTable::precompute(s.initial_, *s.catalog_);
    auto load = [&](const json& x) {
      State st;
      st.sketch = parse_sketch(x.at("sketch").get<std::string>(), *s.catalog_);
      for (const auto& n : x.at("negatives")) st.negatives.push_back(question_from_json(n, *s.catalog_));
      st.pending = scored_from_json(x.at("pending"), *s.catalog_);
      st.status = status_from_name(x.at("status").get<std::string>());
      st.diagnostic = x.at("diagnostic").get<std::string>();
      if (!x.at("failure").is_null()) st.failure = errc_from_name(x.at("failure").get<std::string>());
      st.draws = x.at("draws").get<std::uint64_t>();
      return st;
    };
    s.state_ = load(j.at("state"));
    for (const auto& e : j.at("history")) s.history_.push_back({load(e.at("before")), e.at("accepted").get<bool>()});
    for (const auto& t : j.at("trace"))
      s.trace_.push_back({t.at("sketch").get<std::string>(), t.at("question").get<std::string>(),
                          t.at("answer").get<bool>(), t.at("pi_plus").get<double>(),
                          t.at("score").get<double>()});
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("malformed session snapshot: ") + e.what());
  }
}

BatchResult run_batch(const SketchAst& sketch, std::shared_ptr<const Catalog> catalog,
                      const Completion& truth, const SessionConfig& cfg,
                      const BatchLimits& limits) {
  if (!is_complete(truth) || !matches(sketch, truth))
    throw Error(Errc::GroundTruthNotDerivable, "the target query is not a completion of the sketch");
  auto t0 = std::chrono::steady_clock::now();
  GroundTruthOracle oracle(truth);
  Session s = Session::start(std::move(catalog), sketch, cfg);
  BatchResult r;
  while (s.status() == SessionStatus::AwaitingAnswer) {
    if (limits.max_iterations > 0 && s.iterations() >= limits.max_iterations) {
      r.status = BatchStatus::Timeout;
      break;
    }
    if (limits.wall.count() > 0 && std::chrono::steady_clock::now() - t0 > limits.wall) {
      r.status = BatchStatus::Timeout;
      break;
    }
    s.answer(oracle.answer(s.pending()->question));
  }
  if (s.status() == SessionStatus::Complete) {
    r.status = BatchStatus::Complete;
    r.final = s.sketch();
  } else if (s.status() == SessionStatus::Failed) {
    r.status = BatchStatus::Failed;
    r.diagnostic = s.diagnostic();
  }
  r.iterations = s.iterations();
  r.accepts = s.accepts();
  r.rejects = s.rejects();
  r.trace = s.trace();
  return r;
}

BatchResult run_perfect_oracle(const SketchAst& sketch, const Catalog& catalog,
                               const Completion& truth, std::size_t max_join_depth) {
  if (!is_complete(truth) || !matches(sketch, truth))
    throw Error(Errc::GroundTruthNotDerivable, "the target query is not a completion of the sketch");
  BatchResult r;
  SketchAst p = sketch;
  while (!is_complete(p)) {
    std::vector<Question> truthful;
    try {
      for (auto& q : candidate_questions(p, catalog, {}, max_join_depth))
        if (matches(q.result, truth)) truthful.push_back(std::move(q));
    } catch (const Error& e) {
      if (!synthesis_failure(e.code())) throw;
    }
    if (truthful.empty()) {
      r.status = BatchStatus::Failed;
      r.diagnostic = "no candidate refines the target query";
      return r;
    }
    const Question* best = &truthful.front();
    for (const auto& q : truthful) {
      std::size_t a = size(q.result), b = size(best->result);
      if (a > b || (a == b && q.seq.describe() < best->seq.describe())) best = &q;
    }
    r.trace.push_back({print_sketch(p), best->seq.describe(), true, 1.0, 0.0});
    p = best->result;
    ++r.iterations;
    ++r.accepts;
  }
  r.final = p;
  return r;
}

}  // namespace sqlsketch

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqlsketch {

enum class Errc {
  // catalog
  MalformedSchema,
  MissingTableFile,
  TypeMismatch,
  DanglingKeyReference,
  DuplicateQualifiedColumn,
  UnknownTable,
  // lang
  SyntaxError,
  UnknownColumnConstant,
  HoleKindConflict,
  HoleAtForbiddenPosition,
  NoSuchHole,
  KindMismatch,
  // eval
  UnresolvedColumn,
  UnresolvedTable,
  TypeErrorInPredicate,
  // softsem
  ColumnAbsent,
  TypeIncompatible,
  EmptyColumn,
  // sampler
  NoValidExpansion,
  RejectionExhausted,
  // questions
  NoCandidates,
  EmptyCandidateList,
  // engine
  SessionComplete,
  EmptyHistory,
  GroundTruthNotDerivable,
  // plumbing
  InvalidConfig,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// All library failures are reported through this exception; `code()` names
/// the failure kind and `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

/// Syntax errors carry a 1-based source location.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& detail);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace sqlsketch

#include "sqlsketch/error.hpp"

namespace sqlsketch {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedSchema: return "MalformedSchema";
    case Errc::MissingTableFile: return "MissingTableFile";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::DanglingKeyReference: return "DanglingKeyReference";
    case Errc::DuplicateQualifiedColumn: return "DuplicateQualifiedColumn";
    case Errc::UnknownTable: return "UnknownTable";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownColumnConstant: return "UnknownColumnConstant";
    case Errc::HoleKindConflict: return "HoleKindConflict";
    case Errc::HoleAtForbiddenPosition: return "HoleAtForbiddenPosition";
    case Errc::NoSuchHole: return "NoSuchHole";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::UnresolvedColumn: return "UnresolvedColumn";
    case Errc::UnresolvedTable: return "UnresolvedTable";
    case Errc::TypeErrorInPredicate: return "TypeErrorInPredicate";
    case Errc::ColumnAbsent: return "ColumnAbsent";
    case Errc::TypeIncompatible: return "TypeIncompatible";
    case Errc::EmptyColumn: return "EmptyColumn";
    case Errc::NoValidExpansion: return "NoValidExpansion";
    case Errc::RejectionExhausted: return "RejectionExhausted";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::EmptyCandidateList: return "EmptyCandidateList";
    case Errc::SessionComplete: return "SessionComplete";
    case Errc::EmptyHistory: return "EmptyHistory";
    case Errc::GroundTruthNotDerivable: return "GroundTruthNotDerivable";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

SyntaxError::SyntaxError(std::size_t line, std::size_t column,
                         const std::string& detail)
    : Error(Errc::SyntaxError, std::to_string(line) + ":" +
                                   std::to_string(column) + ": " + detail),
      line_(line),
      column_(column) {}

}  // namespace sqlsketch

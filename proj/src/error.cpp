#include "bibfractal/error.hpp"

namespace bib {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularDerivative: return "SingularDerivative";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInner: return "EmptyInner";
    case ErrorCode::EmptyShell: return "EmptyShell";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::ZeroEvidence: return "ZeroEvidence";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::UnknownHypothesis: return "UnknownHypothesis";
    case ErrorCode::UnknownDatum: return "UnknownDatum";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace bib

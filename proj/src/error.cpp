#include "netmisfit/error.hpp"

namespace netmisfit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::IndivisibleN: return "IndivisibleN";
    case ErrorCode::DegenerateEstimate: return "DegenerateEstimate";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::SingularAn: return "SingularAn";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::MismatchedSpecs: return "MismatchedSpecs";
  }
  return "Unknown";
}

}  // namespace netmisfit

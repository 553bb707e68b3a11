#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netmisfit {

enum class ErrorCode {
  InvalidVertex,
  InvalidIndex,
  ParseError,
  SelfLoop,
  CapacityExceeded,
  InvalidProbability,
  InvalidLabel,
  IndivisibleN,
  DegenerateEstimate,
  IsolatedVertex,
  MissingLabels,
  EmptyBlock,
  SingularAn,
  InvalidArgument,
  NonFiniteEvaluation,
  MismatchedSpecs,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the Monte Carlo tally, the CLI exit-code mapping) can classify it
/// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netmisfit

#pragma once

#include <stdexcept>
#include <string>

namespace regrasp {

enum class ErrorCode {
  AngleNearPi,
  NoPairsFound,
  NoValidTriplet,
  PlanNotFound,
  NotConverged,
  SingularTriplet,
  InvalidInput,
  Io,
};

const char* to_string(ErrorCode code);

// Every failure the library reports is an Error carrying one of the codes
// above, so callers can switch on the code instead of the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regrasp

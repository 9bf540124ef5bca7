#include "regrasp/error.hpp"

namespace regrasp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AngleNearPi: return "AngleNearPi";
    case ErrorCode::NoPairsFound: return "NoPairsFound";
    case ErrorCode::NoValidTriplet: return "NoValidTriplet";
    case ErrorCode::PlanNotFound: return "PlanNotFound";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularTriplet: return "SingularTriplet";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace regrasp

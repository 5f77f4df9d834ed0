#include "dualaction/error.hpp"

namespace dualaction {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unsupported_order: return "unsupported-order";
    case ErrorCode::domain: return "domain";
    case ErrorCode::blow_up: return "blow-up";
    case ErrorCode::rule: return "rule";
    case ErrorCode::unsolvable: return "unsolvable";
    case ErrorCode::root_failure: return "root-failure";
    case ErrorCode::not_saddle: return "not-saddle";
    case ErrorCode::caustic: return "caustic";
    case ErrorCode::bandwidth: return "bandwidth";
    case ErrorCode::enumeration_cap: return "enumeration-cap";
  }
  return "unknown";
}

bool is_precondition(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::unsupported_order:
    case ErrorCode::rule:
    case ErrorCode::unsolvable:
    case ErrorCode::not_saddle:
    case ErrorCode::enumeration_cap:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> node)
    : std::runtime_error(message), code_(code), node_(node) {}

}  // namespace dualaction

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dualaction {

enum class ErrorCode {
  invalid_argument,
  unsupported_order,
  domain,
  blow_up,
  rule,
  unsolvable,
  root_failure,
  not_saddle,
  caustic,
  bandwidth,
  enumeration_cap,
};

/// Machine-readable identifier, e.g. "not-saddle".
std::string_view to_string(ErrorCode code);

/// Precondition failures are the caller's fault (bad model for the request,
/// malformed input); everything else is a numeric failure.
bool is_precondition(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> node = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// Grid node at which the failure happened, when it is node-local.
  std::optional<std::size_t> node() const noexcept { return node_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> node_;
};

}  // namespace dualaction

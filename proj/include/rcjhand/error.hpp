#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcjhand {

enum class ErrorCode {
  invalid_geometry,
  rom_violation,
  unknown_tendon,
  unknown_pair,
  no_minimum_found,
  empty_rom,
  resolution_mismatch,
  coupling_violation,
  unreachable_payout,
  no_convergence,
  unknown_preset,
  no_overlap,
  parse_error,
  validation_error,
  io_error,
};

/// Stable kebab-case name, used in CLI diagnostics.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rcjhand

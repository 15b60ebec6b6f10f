#pragma once

#include <stdexcept>
#include <string>

namespace oamfwm {

enum class ErrorCode {
  NoSignChange,
  NonFinite,
  MaxSubdivisionsExceeded,
  OutOfDomain,
  Overflow,
  NotGuided,
  BranchAmbiguity,
  InconsistentInput,
  DegenerateFlux,
  UnstableMode,
  ForbiddenChannel,
  DirectionMismatch,
  DegenerateDispersion,
  GridTooNarrow,
  NoRootInWindow,
  QuadratureFailure,
  InvalidArgument,
  ConfigInvalid,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + to_string(code) + ": " + message),
        code_(code),
        module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace oamfwm

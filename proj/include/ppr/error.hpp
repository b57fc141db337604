#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppr {

enum class ErrorCode {
  DuplicateIri,
  InvalidAttr,
  UnknownNode,
  TypeViolation,
  CycleIntroduced,
  NotAProductClass,
  EmptyProcessDefinition,
  InvalidArgument,
  TypeMismatch,
  NotAProcess,
  MissingEdge,
  StarvedStep,
  InvalidInstance,
  InstanceTooLarge,
  StaleSchedule,
  KindMismatch,
  BackendUnavailable,
};

std::string_view to_string(ErrorCode code);

// Every engine operation reports failures through this one exception type so
// callers (CLI, HTTP) can map the code to an exit status or response.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ppr

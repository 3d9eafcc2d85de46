#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmsd {

enum class ErrorCode {
  InvalidArgument,
  Io,
  // event ingest
  MissingColumn,
  BadTimestamp,
  EmptyLog,
  // sd-log
  AllStepsInactive,
  // window selection
  SeriesTooShort,
  NoViableCandidate,
  // relations
  TooFewSteps,
  AllColumnsConstant,
  UnknownVariable,
  InsufficientSupport,
  // model generation
  EmptySelection,
  UnknownRelation,
  FlowWithoutStock,
  Lag0AlgebraicCycle,
  UnknownAttachment,
  UnsupportedConstruct,
  // simulation and validation
  UnmatchedElement,
  MissingEquation,
  Diverged,
  NotEnoughSteps,
  // application shell
  MissingInput,
  StepFailed,
  PortInUse,
};

/// Stable snake_case identifier, used in JSON error bodies and CLI output.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pmsd

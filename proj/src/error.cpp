#include "pmsd/error.hpp"

namespace pmsd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io";
    case ErrorCode::MissingColumn: return "missing_column";
    case ErrorCode::BadTimestamp: return "bad_timestamp";
    case ErrorCode::EmptyLog: return "empty_log";
    case ErrorCode::AllStepsInactive: return "all_steps_inactive";
    case ErrorCode::SeriesTooShort: return "series_too_short";
    case ErrorCode::NoViableCandidate: return "no_viable_candidate";
    case ErrorCode::TooFewSteps: return "too_few_steps";
    case ErrorCode::AllColumnsConstant: return "all_columns_constant";
    case ErrorCode::UnknownVariable: return "unknown_variable";
    case ErrorCode::InsufficientSupport: return "insufficient_support";
    case ErrorCode::EmptySelection: return "empty_selection";
    case ErrorCode::UnknownRelation: return "unknown_relation";
    case ErrorCode::FlowWithoutStock: return "flow_without_stock";
    case ErrorCode::Lag0AlgebraicCycle: return "lag0_algebraic_cycle";
    case ErrorCode::UnknownAttachment: return "unknown_attachment";
    case ErrorCode::UnsupportedConstruct: return "unsupported_construct";
    case ErrorCode::UnmatchedElement: return "unmatched_element";
    case ErrorCode::MissingEquation: return "missing_equation";
    case ErrorCode::Diverged: return "diverged";
    case ErrorCode::NotEnoughSteps: return "not_enough_steps";
    case ErrorCode::MissingInput: return "missing_input";
    case ErrorCode::StepFailed: return "step_failed";
    case ErrorCode::PortInUse: return "port_in_use";
  }
  return "unknown";
}

}  // namespace pmsd

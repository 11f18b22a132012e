#include "mflab/types.hpp"

namespace mflab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ModeCapExceeded: return "ModeCapExceeded";
    case ErrorCode::ModeOutOfRange: return "ModeOutOfRange";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SpinSetTooSmall: return "SpinSetTooSmall";
    case ErrorCode::RangeExceedsWindow: return "RangeExceedsWindow";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonEvenAnchor: return "NonEvenAnchor";
    case ErrorCode::StateNotFaithful: return "StateNotFaithful";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MaximalityCheckFailed: return "MaximalityCheckFailed";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonPhysicalState: return "NonPhysicalState";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "UnknownError";
}

}  // namespace mflab

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace mflab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

inline constexpr char kVersion[] = "0.1.0";

enum class ErrorCode {
  ModeCapExceeded,
  ModeOutOfRange,
  WindowTooSmall,
  SpinSetTooSmall,
  RangeExceedsWindow,
  NonHermitian,
  NonEvenAnchor,
  StateNotFaithful,
  LengthMismatch,
  NoConvergence,
  MaximalityCheckFailed,
  GridTooLarge,
  StepTooLarge,
  NonPhysicalState,
  ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mflab

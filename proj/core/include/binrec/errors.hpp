#pragma once

#include <stdexcept>
#include <string>

namespace binrec {

/// Raised when an iterative solve fails to converge or produces non-finite
/// values. Carries the last residual that was observed.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Operation exists but is not defined for the given input (e.g. a 1D-only
/// metric asked for a 2D field).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace binrec

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dlp {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr const char* version = "0.1.0";

// Error hierarchy. The CLI maps each branch to its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, grids or shape specifications supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A shape failed construction-time validation (regularity, simplicity, orientation).
class InvalidShape : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A numerical routine could not deliver its contract (LAPACK failure, Weyl violation, ...).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

}  // namespace dlp

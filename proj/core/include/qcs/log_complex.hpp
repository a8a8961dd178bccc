#pragma once

#include <complex>

namespace qcs {

// Nonzero complex number stored as exp(log_mod + i*arg). The argument is not
// reduced, so products keep a continuous determination.
struct LogComplex {
  double log_mod = 0.0;
  double arg = 0.0;

  static LogComplex from_value(std::complex<double> z);
  static LogComplex from_log(std::complex<double> l) noexcept { return {l.real(), l.imag()}; }

  std::complex<double> log() const noexcept { return {log_mod, arg}; }
  // Plain value; overflows to inf for log_mod > ~709.
  std::complex<double> value() const;

  LogComplex& operator*=(const LogComplex& o) noexcept {
    log_mod += o.log_mod;
    arg += o.arg;
    return *this;
  }
  LogComplex& operator/=(const LogComplex& o) noexcept {
    log_mod -= o.log_mod;
    arg -= o.arg;
    return *this;
  }
  LogComplex reciprocal() const noexcept { return {-log_mod, -arg}; }
};

inline LogComplex operator*(LogComplex a, const LogComplex& b) noexcept { return a *= b; }
inline LogComplex operator/(LogComplex a, const LogComplex& b) noexcept { return a /= b; }

// Reduce an angle to (-pi, pi].
double wrap_angle(double a) noexcept;

// |log a - log b| with the argument difference reduced mod 2*pi.
double log_distance(const LogComplex& a, const LogComplex& b) noexcept;

}  // namespace qcs

#include "qcs/log_complex.hpp"

#include <cmath>
#include <numbers>

#include "qcs/errors.hpp"

namespace qcs {

LogComplex LogComplex::from_value(std::complex<double> z) {
  if (z == 0.0) throw DomainError("LogComplex: zero has no logarithm");
  return {std::log(std::abs(z)), std::arg(z)};
}

std::complex<double> LogComplex::value() const { return std::polar(std::exp(log_mod), arg); }

double wrap_angle(double a) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

double log_distance(const LogComplex& a, const LogComplex& b) noexcept {
  return std::hypot(a.log_mod - b.log_mod, wrap_angle(a.arg - b.arg));
}

}  // namespace qcs

#include "qcs/special.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

constexpr double kZeroTol = 1e-15;

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// log(1 + x) for complex x, accurate when |x| is tiny.
cplx log1p_c(cplx x) {
  const double re = 0.5 * std::log1p(2.0 * x.real() + std::norm(x));
  const double im = std::atan2(x.imag(), 1.0 + x.real());
  return {re, im};
}

// S(w) = sum_j (-w)^j (2m+1)!/(2m+1+j)!, so that the tail
// T(w) = sum_{k>2m} (-1)^(k+1) w^k/k! equals w^(2m+1)/(2m+1)! * S(w).
template <class T>
T tail_ratio(int m, T w) {
  T term = 1.0, sum = 1.0;
  for (int j = 1; j < 500; ++j) {
    term *= -w / static_cast<double>(2 * m + 1 + j);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Q(u) = sum_j (-1)^j (2m)!/(2m-j)! u^j, with P_m(w) = w^(2m)/(2m)! Q(1/w).
template <class T>
T scaled_Q(int m, T u, double* scale) {
  const int d = 2 * m;
  // Horner from the top coefficient c_d = (-1)^d d!.
  std::vector<double> c(d + 1);
  c[0] = 1.0;
  for (int j = 1; j <= d; ++j) c[j] = -c[j - 1] * static_cast<double>(d - j + 1);
  T acc = c[d];
  double s = std::abs(c[d]);
  const double au = std::abs(u);
  for (int j = d - 1; j >= 0; --j) {
    acc = acc * u + c[j];
    s = s * au + std::abs(c[j]);
  }
  if (scale) *scale = s;
  return acc;
}

enum class Regime { tail, direct, scaled };

Regime regime_for(int m, double re_z) {
  if (re_z <= std::log(static_cast<double>(m) + 1.0)) return Regime::tail;
  if (re_z <= std::log(2.0 * m + 4.0)) return Regime::direct;
  return Regime::scaled;
}

// log(e^w T(w)) with log w = z.
cplx log_eT(int m, cplx z, cplx w) {
  return w + static_cast<double>(2 * m + 1) * z - log_factorial(2 * m + 1) + std::log(tail_ratio(m, w));
}

[[noreturn]] void zero_hit(const char* what, cplx z) {
  throw DomainError(std::string(what) + ": argument is a zero of g_m (z = " +
                    std::to_string(z.real()) + " + " + std::to_string(z.imag()) + "i)");
}

cplx direct_P(int m, cplx w, double* scale) {
  const int d = 2 * m;
  cplx acc = 1.0;
  double s = 1.0;
  const double aw = std::abs(w);
  for (int k = d; k >= 1; --k) {
    acc = 1.0 - acc * w / static_cast<double>(k);
    s = 1.0 + s * aw / static_cast<double>(k);
  }
  if (scale) *scale = s;
  return acc;
}

}  // namespace

BlockIndex::BlockIndex(int m) : m_(m) {
  if (m < 0) throw std::invalid_argument("BlockIndex: m must be non-negative");
}

cplx eval_P(BlockIndex m, cplx w) { return direct_P(m.value(), w, nullptr); }

cplx log_P_of_exp(BlockIndex mi, cplx z) {
  const int m = mi.value();
  if (m == 0) return 0.0;
  switch (regime_for(m, z.real())) {
    case Regime::tail: {
      const cplx w = std::exp(z);
      const cplx y = std::exp(log_eT(m, z, w));
      if (std::abs(1.0 + y) <= kZeroTol * (1.0 + std::abs(y))) zero_hit("log_P_of_exp", z);
      return -w + log1p_c(y);
    }
    case Regime::direct: {
      double s = 0.0;
      const cplx p = direct_P(m, std::exp(z), &s);
      if (std::abs(p) <= kZeroTol * s) zero_hit("log_P_of_exp", z);
      return std::log(p);
    }
    case Regime::scaled: {
      double s = 0.0;
      const cplx q = scaled_Q(m, std::exp(-z), &s);
      if (std::abs(q) <= kZeroTol * s) zero_hit("log_P_of_exp", z);
      return static_cast<double>(2 * m) * z - log_factorial(2 * m) + std::log(q);
    }
  }
  return 0.0;
}

LogComplex log_g(BlockIndex mi, cplx z) {
  const int m = mi.value();
  if (z.real() > 709.0) throw std::overflow_error("log_g: e^z overflows");
  const cplx w = std::exp(z);
  if (m == 0) return LogComplex::from_log(w);
  if (regime_for(m, z.real()) == Regime::tail) {
    const cplx y = std::exp(log_eT(m, z, w));
    if (std::abs(1.0 + y) <= kZeroTol * (1.0 + std::abs(y))) zero_hit("log_g", z);
    return LogComplex::from_log(log1p_c(y));
  }
  return LogComplex::from_log(w + log_P_of_exp(mi, z));
}

cplx log_of_log_derivative(BlockIndex mi, cplx z) {
  const int m = mi.value();
  return static_cast<double>(2 * m + 1) * z - log_factorial(2 * m) - log_P_of_exp(mi, z);
}

cplx log_g_prime_over_g(BlockIndex m, cplx z) { return std::exp(log_of_log_derivative(m, z)); }

double log_P_of_exp_real(BlockIndex mi, double x) {
  const int m = mi.value();
  if (m == 0) return 0.0;
  const double w = std::exp(x);
  switch (regime_for(m, x)) {
    case Regime::tail: {
      const double ly = w + (2 * m + 1) * x - log_factorial(2 * m + 1) + std::log(tail_ratio(m, w));
      return -w + std::log1p(std::exp(ly));
    }
    case Regime::direct:
      return std::log(direct_P(m, w, nullptr).real());
    case Regime::scaled:
      return 2 * m * x - log_factorial(2 * m) + std::log(scaled_Q(m, std::exp(-x), nullptr));
  }
  return 0.0;
}

double log_g_real(BlockIndex mi, double x) {
  const int m = mi.value();
  if (x > 709.0) throw std::overflow_error("log_g_real: e^x overflows");
  const double w = std::exp(x);
  if (m == 0) return w;
  if (regime_for(m, x) == Regime::tail) {
    const double ly = w + (2 * m + 1) * x - log_factorial(2 * m + 1) + std::log(tail_ratio(m, w));
    return std::log1p(std::exp(ly));
  }
  return w + log_P_of_exp_real(mi, x);
}

double loglog_g(BlockIndex mi, double x) {
  const int m = mi.value();
  if (m == 0) return x;
  if (regime_for(m, x) == Regime::tail) {
    const double w = std::exp(x);
    // log y with y = e^w T(w); then log(log1p(y)) = log y + log(log1p(y)/y).
    const double ly = w + (2 * m + 1) * x - log_factorial(2 * m + 1) + std::log(tail_ratio(m, w));
    const double y = std::exp(ly);
    const double corr = y < 1e-8 ? -0.5 * y : std::log(std::log1p(y) / y);
    return ly + corr;
  }
  // log g = e^x + log P, so l = x + log1p(log P * e^-x).
  return x + std::log1p(log_P_of_exp_real(mi, x) * std::exp(-x));
}

double log_log_derivative_real(BlockIndex mi, double x) {
  const int m = mi.value();
  return (2 * m + 1) * x - log_factorial(2 * m) - log_P_of_exp_real(mi, x);
}

double loglog_g_slope(BlockIndex m, double x) {
  return std::exp(log_log_derivative_real(m, x) - loglog_g(m, x));
}

std::vector<cplx> roots_P(BlockIndex mi) {
  const int d = mi.degree();
  if (d == 0) return {};
  // Monic form in v = w/s: v^d + sum_{k<d} b_k v^k with b_k = (-1)^k d!/k! s^(k-d).
  const double s = static_cast<double>(d);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int k = 0; k < d; ++k) {
    const double mag = std::exp(log_factorial(d) - log_factorial(k) + (k - d) * std::log(s));
    C(k, d - 1) = -((k % 2 == 0) ? mag : -mag);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("roots_P: eigenvalue solver failed");

  std::vector<cplx> roots;
  roots.reserve(d);
  for (int i = 0; i < d; ++i) {
    cplx w = s * es.eigenvalues()[i];
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      // P and P' together: P' = -(P - w^d/d!) ... use Horner on both.
      cplx p = 1.0, dp = 0.0;
      for (int k = d; k >= 1; --k) {
        dp = -(dp * w + p) / static_cast<double>(k);
        p = 1.0 - p * w / static_cast<double>(k);
      }
      const cplx step = p / dp;
      w -= step;
      if (std::abs(step) <= 1e-13 * std::abs(w)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConvergenceError("roots_P: Newton polish did not converge");
    roots.push_back(w);
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return roots;
}

std::vector<cplx> zeros_g(BlockIndex m, const Rect& rect, double margin) {
  std::vector<cplx> out;
  const double two_pi = 2.0 * std::numbers::pi;
  for (const cplx& w : roots_P(m)) {
    const double re = std::log(std::abs(w));
    const double a = std::arg(w);
    if (re < rect.x0 - margin || re > rect.x1 + margin) continue;
    const long lo = static_cast<long>(std::floor((rect.y0 - margin - a) / two_pi));
    const long hi = static_cast<long>(std::ceil((rect.y1 + margin - a) / two_pi));
    for (long l = lo; l <= hi; ++l) {
      const cplx z{re, a + two_pi * static_cast<double>(l)};
      const double dist = std::min({std::abs(z.real() - rect.x0), std::abs(z.real() - rect.x1),
                                    std::abs(z.imag() - rect.y0), std::abs(z.imag() - rect.y1)});
      const bool inside = rect.contains(z);
      const bool near_x = z.imag() >= rect.y0 - margin && z.imag() <= rect.y1 + margin;
      const bool near_y = z.real() >= rect.x0 - margin && z.real() <= rect.x1 + margin;
      if (near_x && near_y && dist <= margin)
        throw DomainError("zeros_g: a zero lies within the margin of the rectangle boundary");
      if (inside) out.push_back(z);
    }
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return out;
}

}  // namespace qcs

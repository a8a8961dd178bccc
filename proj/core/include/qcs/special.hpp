#pragma once

#include <complex>
#include <vector>

#include "qcs/log_complex.hpp"

namespace qcs {

using cplx = std::complex<double>;

// Non-negative block index m; P_m has degree 2m.
class BlockIndex {
 public:
  BlockIndex() = default;
  explicit BlockIndex(int m);
  int value() const noexcept { return m_; }
  int degree() const noexcept { return 2 * m_; }
  friend bool operator==(BlockIndex a, BlockIndex b) noexcept { return a.m_ == b.m_; }

 private:
  int m_ = 0;
};

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool contains(cplx z) const noexcept {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
};

// P_m(w) = sum_{k=0}^{2m} (-w)^k / k!  (Horner).
cplx eval_P(BlockIndex m, cplx w);

// log P_m(e^z) without overflow. Throws DomainError at zeros.
cplx log_P_of_exp(BlockIndex m, cplx z);

// g_m(z) = P_m(e^z) exp(e^z) in log form. Throws DomainError at zeros of g_m
// and std::overflow_error once e^z itself overflows (Re z > ~709).
LogComplex log_g(BlockIndex m, cplx z);

// log of g_m'/g_m = (2m+1) z - log (2m)! - log P_m(e^z); finite for huge Re z.
cplx log_of_log_derivative(BlockIndex m, cplx z);

// g_m'(z)/g_m(z). Throws DomainError at zeros of P_m(e^z).
cplx log_g_prime_over_g(BlockIndex m, cplx z);

// Real-axis helpers. g_m > 1 on R, so these are real.
double log_P_of_exp_real(BlockIndex m, double x);
double log_g_real(BlockIndex m, double x);
// l_m(x) = log(log g_m(x)), accurate for x in [-1e300, 1e300].
double loglog_g(BlockIndex m, double x);
// d/dx l_m(x) = (g'/g)(x) / log g(x).
double loglog_g_slope(BlockIndex m, double x);
// log((g'/g)(x)) on the real axis.
double log_log_derivative_real(BlockIndex m, double x);

// The 2m roots of P_m, Newton-polished, sorted by (imag, real).
std::vector<cplx> roots_P(BlockIndex m);

// All zeros of g_m in rect, i.e. Log w_j + 2 pi i l. Throws DomainError if a
// zero lies within margin of the rectangle boundary.
std::vector<cplx> zeros_g(BlockIndex m, const Rect& rect, double margin = 1e-9);

}  // namespace qcs

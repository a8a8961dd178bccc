#pragma once

#include <complex>

#include "qcs/special.hpp"

namespace qcs {

struct SpiralParams {
  double k = 1.0;
  cplx mu{1.0, 0.0};
  cplx inv_mu{1.0, 0.0};
  double rho = 1.0;  // 1/Re mu
  double re_mu = 1.0;
  double im_mu = 0.0;
};

// Which one-sided limit to take on a cut: upper (+i0) or lower (-i0).
enum class Side { none, upper, lower };

enum class Region { g_plus, g_minus, gamma, gamma_prime, origin };

const char* to_string(Region r) noexcept;

SpiralParams make_spiral(double k);

// rho from its second closed form 1 + log^2 k / (4 pi^2).
double rho_closed_form(double k);

// p(z) = exp(mu Log z), principal Log. On the negative axis a side is required.
cplx power_p(const SpiralParams& sp, cplx z, Side side = Side::none);

// u = L(w)/mu with the G-branch of log w, i.e. Im u in [-pi, pi]. On the
// spiral Gamma (|Im u| = pi) the side picks +pi (upper) or -pi (lower).
cplx g_branch_log(const SpiralParams& sp, cplx w, Side side = Side::none);

// h(w) = exp(g_branch_log(w)); throws DomainError on Gamma without a side.
cplx inverse_h(const SpiralParams& sp, cplx w, Side side = Side::none);

// h'(w) = h(w) / (mu w).
cplx h_prime(const SpiralParams& sp, cplx w, Side side = Side::none);

Region classify(const SpiralParams& sp, cplx w);

inline constexpr double kCurveBand = 1e-12;

}  // namespace qcs

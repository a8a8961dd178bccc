#pragma once

#include <vector>

#include "qcs/gluing.hpp"
#include "qcs/spiral.hpp"

namespace qcs {

struct JacobianMat {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  double det() const noexcept { return a11 * a22 - a12 * a21; }
};

struct BeltramiSample {
  cplx z;
  cplx mu_val;
  double K = 1.0;
};

// Quasiconformal interpolation between phi on the real axis and the identity
// off the strip |Im z| < 1.
cplx tau(const GlueParams& gp, cplx z);
// Inverse of tau; the real part is solved for along the horizontal line.
cplx tau_inverse(const GlueParams& gp, cplx zeta);

// Analytic Jacobian. On the seams Im z in {-1, 0, 1} the side selects the
// limit from above (upper) or below (lower); without a side they throw.
JacobianMat tau_jacobian(const GlueParams& gp, cplx z, Side side = Side::none);

// mu = dbar/d from a real Jacobian.
BeltramiSample beltrami_from_jacobian(const JacobianMat& J, cplx z);
BeltramiSample beltrami_of_tau(const GlueParams& gp, cplx z, Side side = Side::none);

struct UValue {
  LogComplex value;     // meaningful unless zero is set
  bool zero = false;    // the composition hits a zero of g
  bool origin = false;  // boundary value assigned at w = 0
};

enum class UBranch { plus, minus };

// The glued quasiregular map: g_m o h on G+ and the spirals, g_n o tau o h on G-.
UValue eval_U(const GlueParams& gp, const SpiralParams& sp, cplx w);

// One branch of U evaluated at w with h taken from the given side of Gamma.
// Throws DomainError at zeros of g.
LogComplex eval_U_branch(const GlueParams& gp, const SpiralParams& sp, cplx w, UBranch b,
                         Side side = Side::none);

// Relative jump |log U+ - log U-| / max(1, |log U+|) at the seam point p(x);
// x > 0 lies on Gamma', x < 0 on Gamma.
double seam_jump(const GlueParams& gp, const SpiralParams& sp, double x);

// X = p(lower half of the strip): G- with -1 < Im h < 0.
bool in_X(const SpiralParams& sp, cplx w);

BeltramiSample beltrami_of_U(const GlueParams& gp, const SpiralParams& sp, cplx w);

// Wirtinger derivatives of U at w (off seams): U_w / U and U_wbar / U.
struct ULogDerivs {
  cplx dz;
  cplx dzbar;
};
ULogDerivs U_log_derivatives(const GlueParams& gp, const SpiralParams& sp, cplx w);

struct UZero {
  cplx w;     // zero of U
  cplx zeta;  // h(w)
  UBranch branch;
};

// Zeros of U with |w| <= R, sorted by modulus.
std::vector<UZero> zeros_of_U(const GlueParams& gp, const SpiralParams& sp, double R);

struct LogAreaResult {
  double value = 0.0;      // |mu|^2 times the integral over |z| < R_max
  double tail = 0.0;       // analytic estimate of the part beyond R_max
  double abs_error = 0.0;  // quadrature error estimate
};

// |mu|^2 * integral of dxdy/|z|^2 over {-1 < y < 0, |z| > 1, |z| < R_max}.
LogAreaResult log_area(const SpiralParams& sp, double R_max, double rel_tol = 1e-8);

}  // namespace qcs

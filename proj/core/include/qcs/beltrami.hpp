#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "qcs/grid_field.hpp"
#include "qcs/surgery.hpp"

namespace qcs {

struct TruncatedMu {
  ComplexGridField mu;
  double window_log_area = 0.0;  // log area of X inside the inscribed disc
  double discarded_tail = 0.0;   // analytic log area of X beyond it
  double sup_abs_mu = 0.0;
};

// Cell-averaged mu_U on a cell-centred nx*ny grid over window; zero outside X.
TruncatedMu truncate_mu(const GlueParams& gp, const SpiralParams& sp, const Rect& window, int nx, int ny,
                        int subsamples = 4, int workers = 1);

struct FrameReport {
  double radius = 0.0;
  double sup_dev = 0.0;              // max |psi(z)/z - 1| on the circle
  double exceptional_measure = 0.0;  // radians of the circle inside psi(Y)
};

struct QCSolveReport {
  int iterations = 0;
  double residual = 0.0;     // discrete fixed-point residual max |w - mu (1 + S w)|
  double fd_residual = 0.0;  // finite-difference |dbar psi - mu d psi| where mu is locally constant
  double sup_dev = 0.0;      // max |psi(z)/z - 1| on the outer grid frame
  double deriv_dev = 0.0;    // max |psi' - 1| off the exceptional set
  double mu_sup = 0.0;
  double symbol_max = 0.0;   // max modulus of the discrete Beurling symbol
  std::vector<FrameReport> frames;
};

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 200;
};

// psi = z + C w with w = dbar psi solving w = mu (1 + S w); C and S are the
// free-space Cauchy and Beurling transforms of the piecewise-constant w,
// applied by zero-padded FFT convolution with exact cell-integral kernels.
// psi(z) - z -> 0 at infinity.
struct BeltramiSolution {
  ComplexGridField psi;
  ComplexGridField dpsi;     // 1 + S w
  ComplexGridField dbarpsi;  // w
  QCSolveReport report;
};

BeltramiSolution solve_beltrami(const ComplexGridField& mu, const SolveOptions& opts = {});

// Cell integrals of the kernels at offset d (in units of the spacing) for a
// unit square cell: integral of 1/zeta and of 1/zeta^2.
std::complex<double> cell_integral_inv(std::complex<double> d);
std::complex<double> cell_integral_inv2(std::complex<double> d);

using PointPredicate = std::function<bool(std::complex<double>)>;

// Y = nodes within beta(z) = max(2 h, |z|^(1/2)) of the support of mu.
PointPredicate exceptional_set_from_support(const ComplexGridField& mu);

QCSolveReport conformal_at_infinity_report(const BeltramiSolution& sol, const ComplexGridField& mu,
                                           const PointPredicate& exceptional,
                                           const std::vector<double>& radii = {});

// Smallest finite-difference Jacobian determinant over interior cells.
double min_jacobian_determinant(const ComplexGridField& psi);

// psi^{-1}(z) by Newton on the bilinear interpolants of psi, d psi, dbar psi.
std::complex<double> invert_psi(const BeltramiSolution& sol, std::complex<double> z);
// psi at an arbitrary point by bilinear interpolation (identity outside the grid).
std::complex<double> eval_psi(const BeltramiSolution& sol, std::complex<double> zeta);

}  // namespace qcs

#pragma once

#include <span>
#include <vector>

#include "qcs/special.hpp"

namespace qcs {

struct GlueParams {
  BlockIndex m, n;
  double k = 1.0;      // (2m+1)/(2n+1)
  double c = 0.0;      // log((2n+1)!/(2m+1)!) / (2n+1)
  double delta = 0.5;  // min(1, k)/2
  double tol = 1e-12;  // relative step tolerance of the root solve
  int max_iter = 200;
};

// Throws std::invalid_argument when m == n.
GlueParams glue_constants(BlockIndex m, BlockIndex n, double tol = 1e-12);
// m == n allowed; phi is then the identity. Used as a test oracle.
GlueParams glue_constants_degenerate(BlockIndex m, double tol = 1e-12);

// The unique y with g_m(x) = g_n(y).
double phi(const GlueParams& gp, double x);
// phi'(x) given y = phi(x).
double phi_prime_at(const GlueParams& gp, double x, double y);
double phi_prime(const GlueParams& gp, double x);

// |log log g_m(x) - log log g_n(y)|: the defining identity residual in log-log form.
double glue_residual(const GlueParams& gp, double x, double y);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int points = 0;
};

struct AsymptoticsReport {
  bool degenerate = false;
  TailFit right;  // log|phi(x) - x| against x
  TailFit left;   // log|phi(x) - kx - c| against |x|
};

// Samples with x > 0 feed the right fit, x < 0 the left fit.
AsymptoticsReport verify_asymptotics(const GlueParams& gp, std::span<const double> x_grid);

// Default fit grid: [8, 26] and [-26, -8] with unit steps.
std::vector<double> default_asymptotics_grid();

}  // namespace qcs

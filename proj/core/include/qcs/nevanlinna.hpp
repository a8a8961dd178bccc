#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcs/oscillation.hpp"
#include "qcs/surgery.hpp"

namespace qcs {

struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> excluded;  // excluded angular measure per radius
  std::string label;
  std::string policy;
};

struct ArcExclusionPolicy {
  double max_excluded_measure = 0.05;
  // Returns true for sample points to drop; empty means no exclusion.
  std::function<bool(std::complex<double>, double)> excluded;
  std::string name = "none";
};

// log|f(z)|; -inf is allowed at zeros.
using LogAbsFn = std::function<double(std::complex<double>)>;

struct ProximityResult {
  double value = 0.0;
  double excluded_measure = 0.0;
  int samples = 0;
};

// (1/2 pi) * integral of log+|f(r e^it)| over non-excluded angles, periodic
// trapezoid rule with doubling until the relative change is below rel_tol.
ProximityResult proximity_m(const LogAbsFn& log_abs, double r, const ArcExclusionPolicy& policy = {},
                            double rel_tol = 1e-8, int max_samples = 1 << 24);

// N(r) = sum over 0 < |z_j| <= r of mult * log(r/|z_j|) + n0 * log r.
double counting_N(const std::vector<ZeroRecord>& zeros, int n_at_origin, double r);

RadialProfile counting_profile(const std::vector<ZeroRecord>& zeros, int n_at_origin,
                               const std::vector<double>& radii, const std::string& label);

struct OrderFit {
  double order = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  int points = 0;
};

// Slope of log value against log r over indices [first, last).
OrderFit order_fit(const RadialProfile& p, std::size_t first, std::size_t last);
// Fit over radii >= r_max / 100 (the top two decades).
OrderFit order_fit_top_decades(const RadialProfile& p, double decades = 2.0);

// r0 * ratio^j up to r1 (inclusive within rounding); default ratio 10^(1/8).
std::vector<double> geometric_radii(double r0, double r1, double ratio = 0.0);

// psi^{-1} and its complex derivative at z; identity by default.
using InversePsiHook = std::function<std::pair<std::complex<double>, std::complex<double>>(std::complex<double>)>;

struct ProfileOptions {
  double rel_tol = 1e-6;
  double exclusion_scale = 0.1;  // radius 0.1 / (1 + log r) around zeros of U
  double max_excluded_measure = 0.05;
  int workers = 1;
  InversePsiHook psi_inverse;
};

// log|F'/F| at w for F = U o psi^{-1}, with psi from the hook (identity default).
double log_abs_logderiv_U(const GlueParams& gp, const SpiralParams& sp, std::complex<double> w);

// Distance from w to the nearest zero of U, estimated through the local scale |h'|.
double distance_to_U_zero(const GlueParams& gp, const SpiralParams& sp, const std::vector<cplx>& roots_m,
                          const std::vector<cplx>& roots_n, std::complex<double> w);

// m(r, F'/F) on the radii.
RadialProfile composed_logderiv_profile(const GlueParams& gp, const SpiralParams& sp,
                                        const std::vector<double>& radii, const ProfileOptions& opts = {});

// (1/2 pi) * integral of |log|h'(r e^it)|| on the radii.
RadialProfile log_hprime_profile(const SpiralParams& sp, const std::vector<double>& radii);

struct X1Report {
  double max_deviation = 0.0;  // max |log+|g'/g| / Re z - 1| over Re z >= 10
  int right_samples = 0;
  double max_left_logderiv = 0.0;  // max |g'/g| over Re z < 0 samples
  int left_samples = 0;
  bool pass = false;
};

X1Report x1_check(BlockIndex m, const std::vector<std::complex<double>>& samples);

struct OrderOfA {
  OrderFit order_E;
  OrderFit order_A;
  bool consistent = false;
};

// Fits m(r, 1/E) and the A-profile 2 m(r, 1/E) + log_coeff * log r.
OrderOfA order_of_A_from_E(const RadialProfile& m_inv_E, double log_coeff = 0.0);

void write_profile_csv(const RadialProfile& p, std::ostream& os);

}  // namespace qcs

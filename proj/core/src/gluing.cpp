#include "qcs/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

GlueParams make(BlockIndex m, BlockIndex n, double tol) {
  GlueParams gp;
  gp.m = m;
  gp.n = n;
  const double p = 2.0 * m.value() + 1.0;
  const double q = 2.0 * n.value() + 1.0;
  gp.k = p / q;
  gp.c = (std::lgamma(q + 1.0) - std::lgamma(p + 1.0)) / q;
  gp.delta = 0.5 * std::min(1.0, gp.k);
  gp.tol = tol;
  return gp;
}

TailFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  TailFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rr = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - f.intercept - f.slope * xs[i];
    rr += r * r;
  }
  f.rms_residual = std::sqrt(rr / n);
  return f;
}

}  // namespace

GlueParams glue_constants(BlockIndex m, BlockIndex n, double tol) {
  if (m == n) throw std::invalid_argument("glue_constants: m and n must differ");
  return make(m, n, tol);
}

GlueParams glue_constants_degenerate(BlockIndex m, double tol) { return make(m, m, tol); }

double phi(const GlueParams& gp, double x) {
  const double target = loglog_g(gp.m, x);
  auto f = [&](double y) { return loglog_g(gp.n, y) - target; };

  const double seed = x >= 0.0 ? x : gp.k * x + gp.c;
  double lo = seed - 1.0, hi = seed + 1.0;
  double flo = f(lo), fhi = f(hi);
  for (double width = 2.0; flo > 0.0; width *= 2.0) {
    hi = lo;
    fhi = flo;
    lo -= width;
    flo = f(lo);
    if (width > 1e300) throw ConvergenceError("phi: failed to bracket from below");
  }
  for (double width = 2.0; fhi < 0.0; width *= 2.0) {
    lo = hi;
    flo = fhi;
    hi += width;
    fhi = f(hi);
    if (width > 1e300) throw ConvergenceError("phi: failed to bracket from above");
  }

  double y = std::clamp(seed, lo, hi);
  for (int it = 0; it < gp.max_iter; ++it) {
    const double fy = f(y);
    if (fy == 0.0) return y;
    if (fy < 0.0) lo = y; else hi = y;
    const double slope = loglog_g_slope(gp.n, y);
    double next = y - fy / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - y);
    y = next;
    if (step <= gp.tol * std::max(1.0, std::abs(y))) return y;
  }
  throw ConvergenceError("phi: root solve did not converge");
}

double phi_prime_at(const GlueParams& gp, double x, double y) {
  return std::exp(log_log_derivative_real(gp.m, x) - log_log_derivative_real(gp.n, y));
}

double phi_prime(const GlueParams& gp, double x) { return phi_prime_at(gp, x, phi(gp, x)); }

double glue_residual(const GlueParams& gp, double x, double y) {
  return std::abs(loglog_g(gp.m, x) - loglog_g(gp.n, y));
}

AsymptoticsReport verify_asymptotics(const GlueParams& gp, std::span<const double> x_grid) {
  constexpr double noise = 1e-14;
  std::vector<double> rx, ry, lx, ly;
  for (double x : x_grid) {
    const double y = phi(gp, x);
    if (x > 0.0) {
      const double dev = std::abs(y - x);
      if (dev > noise * std::max(1.0, x)) {
        rx.push_back(x);
        ry.push_back(std::log(dev));
      }
    } else if (x < 0.0) {
      const double dev = std::abs(y - gp.k * x - gp.c);
      if (dev > noise * std::max(1.0, std::abs(x))) {
        lx.push_back(-x);
        ly.push_back(std::log(dev));
      }
    }
  }
  AsymptoticsReport rep;
  if (gp.m == gp.n && rx.empty() && lx.empty()) {
    rep.degenerate = true;
    return rep;
  }
  if (rx.size() < 4) throw InsufficientDataError("verify_asymptotics: fewer than 4 usable right-tail samples");
  if (lx.size() < 4) throw InsufficientDataError("verify_asymptotics: fewer than 4 usable left-tail samples");
  rep.right = fit_line(rx, ry);
  rep.left = fit_line(lx, ly);
  return rep;
}

std::vector<double> default_asymptotics_grid() {
  std::vector<double> g;
  for (int i = 8; i <= 26; ++i) g.push_back(static_cast<double>(i));
  for (int i = -26; i <= -8; ++i) g.push_back(static_cast<double>(i));
  return g;
}

}  // namespace qcs

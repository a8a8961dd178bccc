#include "qcs/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "qcs/errors.hpp"
#include "qcs/parallel.hpp"

namespace qcs {

namespace {
constexpr double kPi = std::numbers::pi;
}

ProximityResult proximity_m(const LogAbsFn& log_abs, double r, const ArcExclusionPolicy& policy, double rel_tol,
                            int max_samples) {
  if (!(r > 0.0)) throw std::invalid_argument("proximity_m: r must be positive");
  auto sample = [&](int j, int n, double& sum, int& excl) {
    const cplx z = std::polar(r, 2.0 * kPi * j / n);
    if (policy.excluded && policy.excluded(z, r)) {
      ++excl;
      return;
    }
    const double v = log_abs(z);
    if (v > 0.0) sum += v;
  };
  int n = 64;
  double sum = 0.0;
  int excl = 0;
  for (int j = 0; j < n; ++j) sample(j, n, sum, excl);
  double prev = sum / n;
  while (true) {
    // Odd points of the doubled grid.
    for (int j = 1; j < 2 * n; j += 2) sample(j, 2 * n, sum, excl);
    n *= 2;
    const double cur = sum / n;
    const double meas = 2.0 * kPi * excl / n;
    if (meas > policy.max_excluded_measure)
      throw DomainError("proximity_m: exclusion policy removes more than the allowed angular measure");
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) || (cur == 0.0 && prev == 0.0)) {
      return {cur, meas, n};
    }
    if (n >= max_samples) throw ConvergenceError("proximity_m: quadrature did not converge");
    prev = cur;
  }
}

double counting_N(const std::vector<ZeroRecord>& zeros, int n_at_origin, double r) {
  double s = n_at_origin * std::log(r);
  for (const ZeroRecord& z : zeros) {
    const double a = std::abs(z.location);
    if (a > 0.0 && a <= r) s += z.multiplicity * std::log(r / a);
  }
  return s;
}

RadialProfile counting_profile(const std::vector<ZeroRecord>& zeros, int n_at_origin,
                               const std::vector<double>& radii, const std::string& label) {
  RadialProfile p;
  p.label = label;
  p.policy = "none";
  for (double r : radii) {
    p.radii.push_back(r);
    p.values.push_back(counting_N(zeros, n_at_origin, r));
    p.excluded.push_back(0.0);
  }
  return p;
}

OrderFit order_fit(const RadialProfile& p, std::size_t first, std::size_t last) {
  if (last > p.radii.size() || first >= last || last - first < 6)
    throw InsufficientDataError("order_fit: window needs at least 6 points");
  std::vector<double> x, y;
  for (std::size_t i = first; i < last; ++i) {
    if (!(p.values[i] > 0.0)) throw InsufficientDataError("order_fit: non-positive value in window");
    x.push_back(std::log(p.radii[i]));
    y.push_back(std::log(p.values[i]));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientDataError("order_fit: degenerate radii");
  OrderFit f;
  f.points = static_cast<int>(x.size());
  f.order = sxy / sxx;
  f.intercept = my - f.order * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.intercept - f.order * x[i];
    rss += e * e;
  }
  f.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

OrderFit order_fit_top_decades(const RadialProfile& p, double decades) {
  if (p.radii.empty()) throw InsufficientDataError("order_fit_top_decades: empty profile");
  const double cut = p.radii.back() * std::pow(10.0, -decades) * (1.0 - 1e-12);
  std::size_t first = 0;
  while (first < p.radii.size() && p.radii[first] < cut) ++first;
  return order_fit(p, first, p.radii.size());
}

std::vector<double> geometric_radii(double r0, double r1, double ratio) {
  if (ratio <= 0.0) ratio = std::pow(10.0, 1.0 / 8.0);
  if (!(r0 > 0.0) || !(r1 >= r0) || !(ratio > 1.0)) throw std::invalid_argument("geometric_radii: bad range");
  std::vector<double> r;
  const double lr = std::log(ratio);
  const int n = static_cast<int>(std::floor(std::log(r1 / r0) / lr + 1e-9));
  for (int j = 0; j <= n; ++j) r.push_back(r0 * std::exp(j * lr));
  return r;
}

double log_abs_logderiv_U(const GlueParams& gp, const SpiralParams& sp, cplx w) {
  const Region reg = classify(sp, w);
  if (reg == Region::origin) return std::numeric_limits<double>::quiet_NaN();
  const Side side = reg == Region::gamma ? Side::upper : Side::none;
  const cplx zeta = inverse_h(sp, w, side);
  // log|h'(w)| = log|h| - log|mu| - log|w|
  const double log_hp = std::log(std::abs(zeta)) - std::log(std::abs(sp.mu)) - std::log(std::abs(w));
  try {
    if (reg != Region::g_minus) return log_of_log_derivative(gp.m, zeta).real() + log_hp;
    if (zeta.imag() <= -1.0) return log_of_log_derivative(gp.n, zeta).real() + log_hp;
    const cplx t = tau(gp, zeta);
    const JacobianMat J = tau_jacobian(gp, zeta);
    const cplx d(0.5 * (J.a11 + J.a22), 0.5 * (J.a21 - J.a12));
    return log_of_log_derivative(gp.n, t).real() + std::log(std::abs(d)) + log_hp;
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

// Distance in the h-plane from zeta to the lattice Log w_j + 2 pi i Z.
double lattice_distance(const std::vector<cplx>& roots, cplx zeta) {
  double best = std::numeric_limits<double>::infinity();
  for (const cplx& w : roots) {
    const double dx = zeta.real() - std::log(std::abs(w));
    const double dy = std::remainder(zeta.imag() - std::arg(w), 2.0 * kPi);
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

}  // namespace

double distance_to_U_zero(const GlueParams& gp, const SpiralParams& sp, const std::vector<cplx>& roots_m,
                          const std::vector<cplx>& roots_n, cplx w) {
  const Region reg = classify(sp, w);
  if (reg == Region::origin) return 0.0;
  const cplx zeta = inverse_h(sp, w, reg == Region::gamma ? Side::upper : Side::none);
  const double hp = std::abs(zeta) / (std::abs(sp.mu) * std::abs(w));
  double dz;
  if (reg != Region::g_minus) {
    dz = lattice_distance(roots_m, zeta);
  } else {
    const cplx t = std::abs(zeta.imag()) < 1.0 ? tau(gp, zeta) : zeta;
    dz = lattice_distance(roots_n, t);
  }
  return dz / hp;
}

RadialProfile composed_logderiv_profile(const GlueParams& gp, const SpiralParams& sp,
                                        const std::vector<double>& radii, const ProfileOptions& opts) {
  const std::vector<cplx> rm = roots_P(gp.m), rn = roots_P(gp.n);
  RadialProfile p;
  p.label = "m(r, F'/F)";
  p.policy = "zero-neighbourhood radius " + std::to_string(opts.exclusion_scale) + "/(1+log r)";
  p.radii = radii;
  p.values.assign(radii.size(), 0.0);
  p.excluded.assign(radii.size(), 0.0);
  ArcExclusionPolicy pol;
  pol.max_excluded_measure = opts.max_excluded_measure;
  pol.name = p.policy;
  const bool has_zeros = !rm.empty() || !rn.empty();
  const double scale = opts.exclusion_scale;
  if (has_zeros) {
    pol.excluded = [&, scale](cplx z, double r) {
      const cplx w = opts.psi_inverse ? opts.psi_inverse(z).first : z;
      return distance_to_U_zero(gp, sp, rm, rn, w) < scale / (1.0 + std::log(r));
    };
  }
  LogAbsFn f = [&](cplx z) {
    if (!opts.psi_inverse) return log_abs_logderiv_U(gp, sp, z);
    const auto [w, dw] = opts.psi_inverse(z);
    return log_abs_logderiv_U(gp, sp, w) + std::log(std::abs(dw));
  };
  parallel_for(radii.size(), opts.workers, [&](std::size_t i) {
    const ProximityResult res = proximity_m(f, radii[i], pol, opts.rel_tol);
    p.values[i] = res.value;
    p.excluded[i] = res.excluded_measure;
  });
  return p;
}

RadialProfile log_hprime_profile(const SpiralParams& sp, const std::vector<double>& radii) {
  RadialProfile p;
  p.label = "mean |log|h'||";
  p.policy = "none";
  for (double r : radii) {
    const int n = 4096;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx w = std::polar(r, 2.0 * kPi * (j + 0.5) / n);
      const Region reg = classify(sp, w);
      const cplx hp = h_prime(sp, w, reg == Region::gamma ? Side::upper : Side::none);
      s += std::abs(std::log(std::abs(hp)));
    }
    p.radii.push_back(r);
    p.values.push_back(s / n);
    p.excluded.push_back(0.0);
  }
  return p;
}

X1Report x1_check(BlockIndex m, const std::vector<cplx>& samples) {
  X1Report rep;
  for (const cplx& z : samples) {
    if (z.real() >= 10.0) {
      const double lp = std::max(0.0, log_of_log_derivative(m, z).real());
      rep.max_deviation = std::max(rep.max_deviation, std::abs(lp / z.real() - 1.0));
      ++rep.right_samples;
    } else if (z.real() < 0.0) {
      rep.max_left_logderiv = std::max(rep.max_left_logderiv, std::abs(log_g_prime_over_g(m, z)));
      ++rep.left_samples;
    }
  }
  rep.pass = rep.max_deviation <= 0.05 && rep.max_left_logderiv < 1.0;
  return rep;
}

OrderOfA order_of_A_from_E(const RadialProfile& m_inv_E, double log_coeff) {
  OrderOfA out;
  out.order_E = order_fit_top_decades(m_inv_E);
  RadialProfile a = m_inv_E;
  a.label = "m(r, A)";
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] = 2.0 * a.values[i] + log_coeff * std::log(a.radii[i]);
  out.order_A = order_fit_top_decades(a);
  const double tol = std::max(out.order_E.stderr_ + out.order_A.stderr_, 1e-3);
  out.consistent = std::abs(out.order_A.order - out.order_E.order) <= tol;
  return out;
}

void write_profile_csv(const RadialProfile& p, std::ostream& os) {
  os << "r,value,excluded_measure\n";
  char buf[96];
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.radii[i], p.values[i], p.excluded[i]);
    os << buf;
  }
}

}  // namespace qcs

#include "qcs/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

constexpr double kPi = std::numbers::pi;

struct StripPoint {
  double f;       // phi(x) or phi(x/k)
  double fprime;  // d/dx of f
};

StripPoint strip_phi(const GlueParams& gp, double x) {
  if (x >= 0.0) {
    const double y = phi(gp, x);
    return {y, phi_prime_at(gp, x, y)};
  }
  const double s = x / gp.k;
  const double y = phi(gp, s);
  return {y, phi_prime_at(gp, s, y) / gp.k};
}

double sign_for(double y, Side side) {
  if (y > 0.0) return 1.0;
  if (y < 0.0) return -1.0;
  if (side == Side::upper) return 1.0;
  if (side == Side::lower) return -1.0;
  throw DomainError("tau_jacobian: point on the real axis; pass a side");
}

}  // namespace

cplx tau(const GlueParams& gp, cplx z) {
  const double x = z.real(), y = z.imag();
  const double ay = std::abs(y);
  if (ay >= 1.0) return z;
  const double f = x >= 0.0 ? phi(gp, x) : phi(gp, x / gp.k);
  return {f + ay * (x - f), y};
}

cplx tau_inverse(const GlueParams& gp, cplx zeta) {
  const double y = zeta.imag(), ay = std::abs(y);
  if (ay >= 1.0) return zeta;
  const double target = zeta.real();
  auto re_tau = [&](double x) { return tau(gp, {x, y}).real(); };
  double lo = target - 1.0, hi = target + 1.0;
  double flo = re_tau(lo) - target, fhi = re_tau(hi) - target;
  for (double w = 2.0; flo > 0.0; w *= 2.0) {
    hi = lo;
    fhi = flo;
    lo -= w;
    flo = re_tau(lo) - target;
  }
  for (double w = 2.0; fhi < 0.0; w *= 2.0) {
    lo = hi;
    flo = fhi;
    hi += w;
    fhi = re_tau(hi) - target;
  }
  double x = std::clamp(target, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const StripPoint sp = strip_phi(gp, x);
    const double fx = sp.f + ay * (x - sp.f) - target;
    if (fx == 0.0) return {x, y};
    if (fx < 0.0) lo = x; else hi = x;
    const double d = sp.fprime * (1.0 - ay) + ay;
    double next = x - fx / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-14 * std::max(1.0, std::abs(x))) return {x, y};
  }
  throw ConvergenceError("tau_inverse: did not converge");
}

JacobianMat tau_jacobian(const GlueParams& gp, cplx z, Side side) {
  const double x = z.real(), y = z.imag();
  const double ay = std::abs(y);
  if (ay > 1.0) return {};
  if (ay == 1.0) {
    const bool outside = (y > 0.0) == (side == Side::upper);
    if (side == Side::none) throw DomainError("tau_jacobian: point on |Im z| = 1; pass a side");
    if (outside) return {};
  }
  const double s = sign_for(y, side);
  const StripPoint p = strip_phi(gp, x);
  JacobianMat J;
  J.a11 = p.fprime * (1.0 - ay) + ay;
  J.a12 = s * (x - p.f);
  J.a21 = 0.0;
  J.a22 = 1.0;
  return J;
}

BeltramiSample beltrami_from_jacobian(const JacobianMat& J, cplx z) {
  const cplx d(0.5 * (J.a11 + J.a22), 0.5 * (J.a21 - J.a12));
  const cplx db(0.5 * (J.a11 - J.a22), 0.5 * (J.a21 + J.a12));
  BeltramiSample b;
  b.z = z;
  b.mu_val = db / d;
  const double a = std::abs(b.mu_val);
  b.K = (1.0 + a) / (1.0 - a);
  return b;
}

BeltramiSample beltrami_of_tau(const GlueParams& gp, cplx z, Side side) {
  return beltrami_from_jacobian(tau_jacobian(gp, z, side), z);
}

LogComplex eval_U_branch(const GlueParams& gp, const SpiralParams& sp, cplx w, UBranch b,
                         Side side) {
  const cplx zeta = inverse_h(sp, w, side);
  if (b == UBranch::plus) return log_g(gp.m, zeta);
  return log_g(gp.n, tau(gp, zeta));
}

UValue eval_U(const GlueParams& gp, const SpiralParams& sp, cplx w) {
  UValue out;
  const Region r = classify(sp, w);
  if (r == Region::origin) {
    out.origin = true;
    return out;
  }
  try {
    if (r == Region::g_minus)
      out.value = eval_U_branch(gp, sp, w, UBranch::minus);
    else
      out.value = eval_U_branch(gp, sp, w, UBranch::plus, r == Region::gamma ? Side::upper : Side::none);
  } catch (const DomainError&) {
    out.zero = true;
  }
  return out;
}

double seam_jump(const GlueParams& gp, const SpiralParams& sp, double x) {
  if (x == 0.0) throw DomainError("seam_jump: x = 0 is the origin");
  const Side s = x > 0.0 ? Side::none : Side::upper;
  const cplx w = power_p(sp, x, s);
  const LogComplex a = eval_U_branch(gp, sp, w, UBranch::plus, x > 0.0 ? Side::none : Side::upper);
  const LogComplex b = eval_U_branch(gp, sp, w, UBranch::minus, x > 0.0 ? Side::none : Side::lower);
  return log_distance(a, b) / std::max(1.0, std::abs(a.log()));
}

bool in_X(const SpiralParams& sp, cplx w) {
  if (classify(sp, w) != Region::g_minus) return false;
  const double t = inverse_h(sp, w).imag();
  return t > -1.0 && t < 0.0;
}

BeltramiSample beltrami_of_U(const GlueParams& gp, const SpiralParams& sp, cplx w) {
  const Region r = classify(sp, w);
  if (r == Region::origin || r == Region::gamma || r == Region::gamma_prime)
    throw DomainError("beltrami_of_U: point on a seam");
  BeltramiSample out;
  out.z = w;
  out.mu_val = 0.0;
  out.K = 1.0;
  if (r == Region::g_plus) return out;
  const cplx zeta = inverse_h(sp, w);
  if (zeta.imag() <= -1.0) return out;
  const BeltramiSample bt = beltrami_of_tau(gp, zeta);
  const cplx hp = zeta * sp.inv_mu / w;
  out.mu_val = bt.mu_val * std::conj(hp) / hp;
  out.K = bt.K;
  return out;
}

ULogDerivs U_log_derivatives(const GlueParams& gp, const SpiralParams& sp, cplx w) {
  const Region r = classify(sp, w);
  if (r == Region::origin || r == Region::gamma || r == Region::gamma_prime)
    throw DomainError("U_log_derivatives: point on a seam");
  const cplx zeta = inverse_h(sp, w);
  const cplx hp = zeta * sp.inv_mu / w;
  if (r == Region::g_plus) return {log_g_prime_over_g(gp.m, zeta) * hp, 0.0};
  const cplx t = tau(gp, zeta);
  const cplx gl = log_g_prime_over_g(gp.n, t);
  if (zeta.imag() <= -1.0) return {gl * hp, 0.0};
  const JacobianMat J = tau_jacobian(gp, zeta);
  const cplx d(0.5 * (J.a11 + J.a22), 0.5 * (J.a21 - J.a12));
  const cplx db(0.5 * (J.a11 - J.a22), 0.5 * (J.a21 + J.a12));
  // Chain rule: U = G(tau(h(w))) with G analytic, h analytic.
  return {gl * d * hp, gl * db * std::conj(hp)};
}

std::vector<UZero> zeros_of_U(const GlueParams& gp, const SpiralParams& sp, double R) {
  const double zeta_max = std::pow(R * std::exp(std::abs(sp.im_mu) * kPi), 1.0 / sp.re_mu) + 10.0;
  std::vector<UZero> out;
  const Rect upper{-60.0, 60.0, 1e-3, zeta_max};
  for (const cplx& z : zeros_g(gp.m, upper, 0.0)) {
    const cplx w = power_p(sp, z);
    if (std::abs(w) <= R) out.push_back({w, z, UBranch::plus});
  }
  const Rect lower{-60.0, 60.0, -zeta_max, -1e-3};
  for (const cplx& z0 : zeros_g(gp.n, lower, 0.0)) {
    const cplx z = tau_inverse(gp, z0);
    const cplx w = power_p(sp, z);
    if (std::abs(w) <= R) out.push_back({w, z, UBranch::minus});
  }
  std::sort(out.begin(), out.end(), [](const UZero& a, const UZero& b) {
    const double ra = std::abs(a.w), rb = std::abs(b.w);
    if (ra != rb) return ra < rb;
    return std::arg(a.w) < std::arg(b.w);
  });
  return out;
}

namespace {

// Adaptive Simpson on [a, b].
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth, double& err) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) {
    err += std::abs(diff) / 15.0;
    return left + right + diff / 15.0;
  }
  if (depth <= 0) throw ConvergenceError("log_area: adaptive quadrature did not converge");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
}

}  // namespace

LogAreaResult log_area(const SpiralParams& sp, double R_max, double rel_tol) {
  if (!(R_max > 1.0)) throw std::invalid_argument("log_area: R_max must exceed 1");
  // Polar coordinates s = log r, theta. The angular extent of the strip
  // -1 < y < 0 on |z| = r is 2 asin(1/r), so the inner integral is exact.
  // s = t^2 removes the square-root behaviour at r = 1.
  auto f = [](double t) {
    const double r = std::exp(t * t);
    return 2.0 * t * 2.0 * std::asin(std::min(1.0, 1.0 / r));
  };
  const double b = std::sqrt(std::log(R_max));
  const double fa = f(0.0), fm = f(0.5 * b), fb = f(b);
  const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
  // Reference magnitude for the relative tolerance: the integral is at least
  // the first-order tail difference.
  const double scale = std::max(std::abs(whole), 1e-3);
  double err = 0.0;
  const double I = simpson_rec(f, 0.0, b, fa, fm, fb, whole, rel_tol * scale, 60, err);
  const double mu2 = std::norm(sp.mu);
  LogAreaResult res;
  res.value = mu2 * I;
  res.tail = mu2 * (2.0 / R_max + 1.0 / (9.0 * R_max * R_max * R_max));
  res.abs_error = mu2 * err;
  return res;
}

}  // namespace qcs

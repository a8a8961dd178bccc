#include "qcs/spiral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcs/errors.hpp"

namespace qcs {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* to_string(Region r) noexcept {
  switch (r) {
    case Region::g_plus: return "G_plus";
    case Region::g_minus: return "G_minus";
    case Region::gamma: return "Gamma";
    case Region::gamma_prime: return "Gamma_prime";
    case Region::origin: return "origin";
  }
  return "?";
}

double rho_closed_form(double k) {
  const double lk = std::log(k);
  return 1.0 + lk * lk / (4.0 * kPi * kPi);
}

SpiralParams make_spiral(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("make_spiral: k must be positive");
  SpiralParams sp;
  sp.k = k;
  const double lk = std::log(k);
  sp.mu = 2.0 * kPi * cplx(2.0 * kPi, -lk) / (4.0 * kPi * kPi + lk * lk);
  sp.inv_mu = cplx(1.0, lk / (2.0 * kPi));
  sp.re_mu = sp.mu.real();
  sp.im_mu = sp.mu.imag();
  sp.rho = 1.0 / sp.re_mu;
  if (std::abs(sp.rho - rho_closed_form(k)) > 1e-14 * sp.rho)
    throw std::logic_error("make_spiral: closed forms of rho disagree");
  return sp;
}

cplx power_p(const SpiralParams& sp, cplx z, Side side) {
  if (z == 0.0) throw DomainError("power_p: z = 0 is not in the slit plane");
  double a;
  if (z.imag() == 0.0 && z.real() < 0.0) {
    if (side == Side::none) throw DomainError("power_p: z on the cut; pass a side");
    a = side == Side::upper ? kPi : -kPi;
  } else {
    a = std::arg(z);
  }
  return std::exp(sp.mu * cplx(std::log(std::abs(z)), a));
}

cplx g_branch_log(const SpiralParams& sp, cplx w, Side side) {
  if (w == 0.0) throw DomainError("g_branch_log: w = 0");
  const cplx base = cplx(std::log(std::abs(w)), std::arg(w)) * sp.inv_mu;
  // Adding 2 pi i j to log w moves Im u by 2 pi j Re(1/mu).
  const double shift = 2.0 * kPi * sp.inv_mu.real();
  const cplx step = cplx(0.0, 2.0 * kPi) * sp.inv_mu;
  const double j = std::round(-base.imag() / shift);
  cplx u = base + j * step;
  const double t = u.imag();
  if (std::abs(std::abs(t) - kPi) <= kCurveBand) {
    if (side == Side::upper && t < 0.0) u += step;
    else if (side == Side::lower && t > 0.0) u -= step;
  } else if (t > kPi) {
    u -= step;
  } else if (t < -kPi) {
    u += step;
  }
  return u;
}

cplx inverse_h(const SpiralParams& sp, cplx w, Side side) {
  const cplx u = g_branch_log(sp, w, side);
  if (side == Side::none && std::abs(std::abs(u.imag()) - kPi) <= kCurveBand)
    throw DomainError("inverse_h: w lies on the spiral Gamma; pass a side");
  return std::exp(u);
}

cplx h_prime(const SpiralParams& sp, cplx w, Side side) {
  return inverse_h(sp, w, side) * sp.inv_mu / w;
}

Region classify(const SpiralParams& sp, cplx w) {
  if (w == 0.0) return Region::origin;
  const double t = g_branch_log(sp, w).imag();
  if (std::abs(t) <= kCurveBand) return Region::gamma_prime;
  if (std::abs(t) >= kPi - kCurveBand) return Region::gamma;
  return t > 0.0 ? Region::g_plus : Region::g_minus;
}

}  // namespace qcs

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qcs/errors.hpp"
#include "qcs/spiral.hpp"

using namespace qcs;
using std::numbers::pi;

TEST_CASE("mu for k = 1/5 and k = 1") {
  const SpiralParams sp = make_spiral(0.2);
  CHECK(std::abs(sp.mu - cplx(0.9384, 0.2403)) < 1e-3);
  const SpiralParams one = make_spiral(1.0);
  CHECK(one.mu == cplx(1.0, 0.0));
  CHECK(one.rho == 1.0);
  const SpiralParams third = make_spiral(1.0 / 3);
  CHECK(third.rho == doctest::Approx(1 + std::log(3.0) * std::log(3.0) / (4 * pi * pi)).epsilon(1e-15));
  CHECK_THROWS_AS(make_spiral(0.0), std::invalid_argument);
}

TEST_CASE("constraint identities and closed forms of rho") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(std::log(0.01), std::log(100.0));
  for (int i = 0; i < 50; ++i) {
    const double k = std::exp(u(rng));
    const SpiralParams sp = make_spiral(k);
    CHECK(std::abs(sp.rho - rho_closed_form(k)) <= 1e-14 * sp.rho);
    const cplx ipi(0, pi);
    CHECK(std::abs((sp.mu * (std::log(k) - ipi)).real() - (sp.mu * ipi).real()) <= 1e-12);
    CHECK(std::abs((ipi / sp.mu).imag() - pi) <= 1e-12);
  }
}

TEST_CASE("power map and its inverse") {
  const SpiralParams sp = make_spiral(1.0 / 3);
  CHECK(std::abs(power_p(sp, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(inverse_h(sp, 1.0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(power_p(sp, -2.0), DomainError);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ur(-3, 3), ut(-pi + 1e-6, pi - 1e-6);
  for (int i = 0; i < 500; ++i) {
    const cplx z = std::polar(std::exp(ur(rng)), ut(rng));
    CHECK(std::abs(inverse_h(sp, power_p(sp, z)) - z) <= 1e-12 * std::abs(z));
  }
}

TEST_CASE("gluing identity p(x+i0) = p(kx-i0)") {
  for (double k : {1.0 / 3, 3.0 / 5, 0.2, 3.0}) {
    const SpiralParams sp = make_spiral(k);
    for (double x : {-0.01, -0.5, -1.0, -7.0, -300.0}) {
      const cplx a = power_p(sp, x, Side::upper), b = power_p(sp, k * x, Side::lower);
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
      // h-boundary values of Gamma lie on the negative axis from both sides.
      const cplx hu = inverse_h(sp, a, Side::upper), hl = inverse_h(sp, a, Side::lower);
      CHECK(std::abs(hu - x) <= 1e-12 * std::abs(x));
      CHECK(std::abs(hl - k * x) <= 1e-12 * std::abs(k * x));
      CHECK(classify(sp, a) == Region::gamma);
    }
    CHECK_THROWS_AS(inverse_h(sp, power_p(sp, -2.0, Side::upper)), DomainError);
  }
}

TEST_CASE("circle |w| = r meets the positive axis at r^(1/Re mu)") {
  const SpiralParams sp = make_spiral(0.2);
  for (double r : {0.5, 2.0, 10.0, 1e4}) {
    // Walk around the circle and find the point where h is real positive.
    double best = 1e300, val = 0;
    const int n = 200000;
    for (int j = 0; j < n; ++j) {
      const cplx w = std::polar(r, 2 * pi * j / n - pi);
      if (classify(sp, w) == Region::gamma) continue;
      const cplx h = inverse_h(sp, w);
      if (h.real() > 0 && std::abs(h.imag()) < best) {
        best = std::abs(h.imag());
        val = h.real();
      }
    }
    CHECK(val == doctest::Approx(std::pow(r, 1 / sp.re_mu)).epsilon(1e-4));
  }
}

TEST_CASE("classification") {
  const SpiralParams sp = make_spiral(0.2);
  CHECK(classify(sp, power_p(sp, cplx(0, 1))) == Region::g_plus);
  CHECK(classify(sp, power_p(sp, 2.0)) == Region::gamma_prime);
  CHECK(classify(sp, 0.0) == Region::origin);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(-4, 4), ut(0.01, pi - 0.01);
  for (int i = 0; i < 1000; ++i) {
    const cplx z = std::polar(std::exp(ur(rng)), ut(rng));
    CHECK(classify(sp, power_p(sp, z)) == Region::g_plus);
    CHECK(classify(sp, power_p(sp, std::conj(z))) == Region::g_minus);
  }
  const SpiralParams one = make_spiral(1.0);
  std::uniform_real_distribution<double> ub(-5, 5);
  for (int i = 0; i < 500; ++i) {
    const cplx w(ub(rng), ub(rng));
    const Region r = classify(one, w);
    if (w.imag() > 1e-9) CHECK(r == Region::g_plus);
    if (w.imag() < -1e-9) CHECK(r == Region::g_minus);
  }
}

TEST_CASE("power map is conformal") {
  const SpiralParams sp = make_spiral(1.0 / 3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ur(0.2, 3.0), ut(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z = std::polar(ur(rng), ut(rng));
    const double h = 1e-5;
    const cplx fx = (power_p(sp, z + h) - power_p(sp, z - h)) / (2 * h);
    const cplx fy = (power_p(sp, z + cplx(0, h)) - power_p(sp, z - cplx(0, h))) / (2 * h);
    const cplx dbar = 0.5 * (fx + cplx(0, 1) * fy);
    CHECK(std::abs(dbar) <= 1e-8 * std::max(1.0, std::abs(fx)));
    const cplx hp = h_prime(sp, power_p(sp, z));
    CHECK(std::abs(hp * fx - 1.0) < 1e-8);
  }
}

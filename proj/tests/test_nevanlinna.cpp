#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qcs/nevanlinna.hpp"
#include "qcs/spiral.hpp"

using namespace qcs;
using std::numbers::pi;

namespace {
double log_abs_sin(cplx z) { return std::log(std::abs(std::sin(z))); }
double log_abs_cos(cplx z) { return std::log(std::abs(std::cos(z))); }

RadialProfile synthetic(double rho, double c = 1.0, double logc = 0.0) {
  RadialProfile p;
  p.radii = geometric_radii(1e2, 1e6);
  for (double r : p.radii) p.values.push_back(c * std::pow(r, rho) + logc * std::log(r));
  p.excluded.assign(p.radii.size(), 0.0);
  return p;
}

std::vector<ZeroRecord> sin_zeros(double R) {
  std::vector<ZeroRecord> z;
  for (int k = 1; k * pi <= R + 1; ++k) {
    z.push_back({k * pi, 1, std::cos(k * pi)});
    z.push_back({-k * pi, 1, std::cos(k * pi)});
  }
  return z;
}
}  // namespace

TEST_CASE("proximity of classical functions") {
  for (double r : {1.0, 10.0, 50.0, 200.0}) {
    const ProximityResult e = proximity_m([](cplx z) { return z.real(); }, r);
    CHECK(std::abs(e.value - r / pi) < 1e-8 * r / pi);
    const ProximityResult c = proximity_m([](cplx) { return std::log(3.0); }, r);
    CHECK(std::abs(c.value - std::log(3.0)) < 1e-14);
    CHECK(proximity_m([](cplx) { return -2.0; }, r).value == 0.0);
  }
  // g_0'/g_0 = e^z through the log-derivative evaluator.
  for (double r : {10.0, 100.0}) {
    const ProximityResult g =
        proximity_m([](cplx z) { return log_of_log_derivative(BlockIndex(0), z).real(); }, r);
    CHECK(std::abs(g.value - r / pi) < 1e-8 * r / pi);
  }
}

TEST_CASE("proximity exclusion") {
  ArcExclusionPolicy pol;
  pol.excluded = [](cplx z, double) { return std::abs(std::arg(z)) < 0.01; };
  const ProximityResult e = proximity_m([](cplx z) { return z.real(); }, 10.0, pol, 1e-6);
  CHECK(e.excluded_measure > 0.0);
  CHECK(e.excluded_measure < 0.05);
  ArcExclusionPolicy greedy;
  greedy.excluded = [](cplx z, double) { return z.real() > 0; };
  CHECK_THROWS_AS(proximity_m([](cplx z) { return z.real(); }, 10.0, greedy), DomainError);
}

TEST_CASE("counting function") {
  CHECK(counting_N({}, 0, 10.0) == 0.0);
  CHECK(std::abs(counting_N({{cplx(0, 2), 1, 1.0}}, 0, 5.0) - std::log(2.5)) < 1e-15);
  CHECK(counting_N({{cplx(0, 2), 1, 1.0}}, 0, 1.5) == 0.0);
  CHECK(std::abs(counting_N({}, 2, 5.0) - 2 * std::log(5.0)) < 1e-15);
  const double N = counting_N(sin_zeros(200), 1, 200.0);
  CHECK(std::abs(N / 200.0 / (2 / pi) - 1.0) < 0.02);
}

TEST_CASE("Jensen consistency") {
  // m(r, f) + N(r, f) = m(r, 1/f) + N(r, 1/f) + log|c| with f(z) ~ c z^n at 0.
  for (double r : {10.0, 50.0, 200.0}) {
    const double T_exp = proximity_m([](cplx z) { return z.real(); }, r).value;
    const double inv_exp = proximity_m([](cplx z) { return -z.real(); }, r).value;
    CHECK(std::abs(T_exp - inv_exp) < 1e-2 * T_exp);
    CHECK(std::abs(T_exp - r / pi) < 1e-2 * T_exp);

    const double m_sin = proximity_m(log_abs_sin, r).value;
    const double m_inv_sin = proximity_m([](cplx z) { return -log_abs_sin(z); }, r).value;
    const double N_sin = counting_N(sin_zeros(r), 1, r);
    CHECK(std::abs(m_sin - (m_inv_sin + N_sin)) < 1e-2 * m_sin);

    std::vector<ZeroRecord> poles;
    for (int k = 0; (k + 0.5) * pi <= r + 1; ++k) {
      poles.push_back({(k + 0.5) * pi, 1, 0.0});
      poles.push_back({-(k + 0.5) * pi, 1, 0.0});
    }
    const auto log_tan = [](cplx z) { return log_abs_sin(z) - log_abs_cos(z); };
    const double T_tan = proximity_m(log_tan, r).value + counting_N(poles, 0, r);
    const double T_inv = proximity_m([&](cplx z) { return -log_tan(z); }, r).value + N_sin;
    CHECK(std::abs(T_tan - T_inv) < 1e-2 * T_tan);
  }
}

TEST_CASE("order fits") {
  RadialProfile p;
  p.radii = geometric_radii(1e2, 1e6);
  REQUIRE(p.radii.size() == 33);
  CHECK(std::abs(p.radii.back() - 1e6) < 1e-6);
  for (double r : p.radii) p.values.push_back(r / pi);
  OrderFit f = order_fit(p, 0, p.radii.size());
  CHECK(std::abs(f.order - 1.0) < 1e-10);
  CHECK(f.stderr_ < 1e-10);
  f = order_fit_top_decades(synthetic(1.3));
  CHECK(std::abs(f.order - 1.3) < 1e-10);
  CHECK(f.points == 17);
  CHECK_THROWS(order_fit(p, 0, 5));
  RadialProfile bad = p;
  bad.values[3] = 0.0;
  CHECK_THROWS(order_fit(bad, 0, 10));
}

TEST_CASE("order of A from E") {
  const OrderOfA a = order_of_A_from_E(synthetic(1.05));
  CHECK(std::abs(a.order_A.order - 1.05) < 1e-10);
  CHECK(a.consistent);
  const OrderOfA b = order_of_A_from_E(synthetic(1.05), 3.0);
  CHECK(std::abs(b.order_A.order - 1.05) < 1e-3);
  const OrderFit c = order_fit_top_decades(synthetic(1.05, 1.0, 3.0));
  CHECK(std::abs(c.order - 1.05) < 1e-3);
}

TEST_CASE("x1 asymptotics of g'/g") {
  std::vector<cplx> samples;
  for (double x : {10.0, 20.0, 40.0})
    for (double y : {-7.0, 0.5, 3.0, 11.0}) samples.push_back({x, y});
  for (double x : {-5.0, -20.0})
    for (double y : {-1.0, 2.0}) samples.push_back({x, y});
  const X1Report r0 = x1_check(BlockIndex(0), samples);
  CHECK(r0.max_deviation < 1e-14);
  CHECK(r0.pass);
  const X1Report r1 = x1_check(BlockIndex(1), {cplx(20, 3)});
  CHECK(r1.max_deviation < 0.05);
  const X1Report r2 = x1_check(BlockIndex(2), samples);
  CHECK(r2.pass);
  CHECK(r2.left_samples == 4);
  CHECK(r2.max_left_logderiv < 1.0);
}

TEST_CASE("counting orders of g_m and of U zeros") {
  // Zeros of g_1 in |z| <= R lie in a vertical band; order of the counting profile is 1.
  const std::vector<cplx> roots = roots_P(BlockIndex(1));
  std::vector<ZeroRecord> zs;
  const double R = 1e4;
  for (const cplx& v : roots) {
    const cplx base = std::log(v);
    for (int j = -static_cast<int>(R / (2 * pi)) - 2; j <= static_cast<int>(R / (2 * pi)) + 2; ++j)
      zs.push_back({base + cplx(0, 2 * pi * j), 1, 0.0});
  }
  const RadialProfile p = counting_profile(zs, 0, geometric_radii(1e1, 1e3), "N(r, 1/g_1)");
  CHECK(std::abs(order_fit_top_decades(p).order - 1.0) < 0.02);

  const GlueParams gp = glue_constants(BlockIndex(0), BlockIndex(1));
  const SpiralParams sp = make_spiral(gp.k);
  std::vector<ZeroRecord> uz;
  for (const UZero& z : zeros_of_U(gp, sp, 3e3)) uz.push_back({z.w, 1, 0.0});
  REQUIRE(uz.size() > 50);
  const RadialProfile q = counting_profile(uz, 0, geometric_radii(3e1, 3e3), "N(r, 1/U)");
  const double rho = 1.0 / sp.re_mu;
  MESSAGE("counting order of U zeros " << order_fit_top_decades(q).order << " vs rho " << rho);
  CHECK(order_fit_top_decades(q).order <= rho * 1.02);
}

TEST_CASE("composed profile") {
  SUBCASE("degenerate pair is the e^z pipeline") {
    const GlueParams gp = glue_constants_degenerate(BlockIndex(0));
    const SpiralParams sp = make_spiral(1.0);
    const RadialProfile p = composed_logderiv_profile(gp, sp, geometric_radii(1e2, 1e4));
    const OrderFit f = order_fit_top_decades(p);
    CHECK(std::abs(f.order - 1.0) < 0.01);
  }
  SUBCASE("(0,1) pipeline on two decades") {
    const GlueParams gp = glue_constants(BlockIndex(0), BlockIndex(1));
    const SpiralParams sp = make_spiral(gp.k);
    const RadialProfile p = composed_logderiv_profile(gp, sp, geometric_radii(1e2, 1e4, std::pow(10.0, 0.25)));
    const OrderFit f = order_fit(p, 0, p.radii.size());
    MESSAGE("order " << f.order << " +- " << f.stderr_ << " target " << 1.0 / sp.re_mu);
    CHECK(std::abs(f.order / (1.0 / sp.re_mu) - 1.0) < 0.05);
    for (double e : p.excluded) CHECK(e <= 0.05);
    std::ostringstream os;
    write_profile_csv(p, os);
    CHECK(os.str().rfind("r,value,excluded_measure\n", 0) == 0);
  }
  SUBCASE("log h' term grows like log r") {
    const SpiralParams sp = make_spiral(glue_constants(BlockIndex(0), BlockIndex(1)).k);
    const std::vector<double> radii = geometric_radii(1e2, 1e6, 10.0);
    const RadialProfile p = log_hprime_profile(sp, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) CHECK(p.values[i] <= 2.0 * (1.0 + std::log(radii[i])));
    // Increments per decade stay bounded.
    for (std::size_t i = 1; i < radii.size(); ++i) CHECK(p.values[i] - p.values[i - 1] < 2.0 * std::log(10.0));
  }
}

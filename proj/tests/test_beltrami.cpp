#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fields.hpp"
#include "qcs/beltrami.hpp"

using namespace qcs;
using namespace testfields;
using std::numbers::pi;

namespace {
constexpr double K = 2.0;
constexpr double mu0 = (K - 1) / (K + 1);

// Gauss-Legendre reference for the unit-cell integral of zeta^-p.
cplx cell_gl(cplx d, int p) {
  static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975363};
  static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                              0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  const int sub = 16;
  cplx s = 0;
  for (int a = 0; a < sub; ++a)
    for (int b = 0; b < sub; ++b)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const double u = -0.5 + (a + 0.5 * (x[i] + 1)) / sub, v = -0.5 + (b + 0.5 * (x[j] + 1)) / sub;
          const cplx z = d + cplx(u, v);
          s += w[i] * w[j] / (4.0 * sub * sub) * std::pow(z, -p);
        }
  return s;
}
}  // namespace

TEST_CASE("cell-integral kernels against Gauss-Legendre") {
  for (cplx d : {cplx(1, 0), cplx(0, 1), cplx(1, 1), cplx(-2, 3), cplx(5, -4), cplx(15, 2)}) {
    CHECK(std::abs(cell_integral_inv(d) - cell_gl(d, 1)) < 1e-10);
    CHECK(std::abs(cell_integral_inv2(d) - cell_gl(d, 2)) < 1e-10);
  }
  // Far-field expansion and closed form agree across the switch.
  for (cplx d : {cplx(16, 3), cplx(-16, 16), cplx(7, -16)}) {
    const cplx e = cplx(1e-9, 1e-9);
    CHECK(std::abs(cell_integral_inv(d + cplx(0.5, 0)) - cell_gl(d + cplx(0.5, 0), 1)) < 1e-12);
    CHECK(std::abs(cell_integral_inv2(d + cplx(0.5, 0)) - cell_gl(d + cplx(0.5, 0), 2)) < 1e-12);
    (void)e;
  }
  CHECK(std::abs(cell_integral_inv(cplx(17, 1)) - cell_gl(cplx(17, 1), 1)) < 1e-13);
  CHECK(std::abs(cell_integral_inv2(cplx(17, 1)) - cell_gl(cplx(17, 1), 2)) < 1e-13);
}

TEST_CASE("zero coefficient gives the identity") {
  ComplexGridField mu = make_cell_centred_grid(-1, 1, -1, 1, 64, 64);
  const BeltramiSolution s = solve_beltrami(mu);
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) CHECK(s.psi.at(ix, iy) == mu.node(ix, iy));
  CHECK(s.report.iterations == 0);
  const QCSolveReport r = conformal_at_infinity_report(s, mu, exceptional_set_from_support(mu));
  CHECK(r.sup_dev == 0.0);
  CHECK(r.deriv_dev == 0.0);
}

TEST_CASE("disk and annulus fields at 256^2 and refinement") {
  SolveOptions opt;
  opt.tol = 1e-10;
  double ed[2], ea[2], fd[2];
  int i = 0;
  for (int N : {128, 256}) {
    const ComplexGridField md = disk_mu(N, 1.0, 0.5, mu0);
    const BeltramiSolution sd = solve_beltrami(md, opt);
    ed[i] = disk_error(sd, 0.5, mu0);
    fd[i] = sd.report.fd_residual;
    CHECK(sd.report.residual < 1e-5);
    CHECK(min_jacobian_determinant(sd.psi) > 0.0);
    const ComplexGridField ma = annulus_mu(N, 1.0, 0.25, 0.6, mu0);
    const BeltramiSolution sa = solve_beltrami(ma, opt);
    ea[i] = annulus_error(sa, 0.25, 0.6, K);
    CHECK(min_jacobian_determinant(sa.psi) > 0.0);
    MESSAGE("N=" << N << " disk err " << ed[i] << " annulus err " << ea[i] << " iters " << sa.report.iterations
                 << " symbol " << sa.report.symbol_max << " fd residual " << fd[i]);
    ++i;
  }
  CHECK(ed[1] < 0.02);
  CHECK(ea[1] < 0.02);
  CHECK(ed[0] / ed[1] >= 2.0);
  CHECK(ea[0] / ea[1] >= 2.0);
  CHECK(fd[1] < 1e-2);
}

TEST_CASE("solver rejects |mu| >= 1") {
  ComplexGridField mu = make_cell_centred_grid(-1, 1, -1, 1, 8, 8);
  mu.at(3, 3) = 1.0;
  CHECK_THROWS_AS(solve_beltrami(mu), std::invalid_argument);
}

TEST_CASE("conformality at infinity trends") {
  // Fixed spacing and support, growing window.
  double prev = 1e300;
  for (int N : {64, 128, 256}) {
    const double L = N / 128.0;
    const ComplexGridField mu = disk_mu(N, L, 0.25, mu0, 8);
    const BeltramiSolution s = solve_beltrami(mu);
    const QCSolveReport r = conformal_at_infinity_report(s, mu, exceptional_set_from_support(mu));
    CHECK(r.sup_dev < prev);
    prev = r.sup_dev;
  }
  const ComplexGridField mu = disk_mu(256, 2.0, 0.25, mu0, 8);
  const BeltramiSolution s = solve_beltrami(mu);
  const QCSolveReport r = conformal_at_infinity_report(s, mu, exceptional_set_from_support(mu), {0.6, 1.0, 1.5});
  REQUIRE(r.frames.size() == 3);
  CHECK(r.frames[1].sup_dev < r.frames[0].sup_dev);
  CHECK(r.frames[2].sup_dev < r.frames[1].sup_dev);
  CHECK(r.deriv_dev < 0.05);
}

TEST_CASE("exceptional measure shrinks with radius for a spiral-like support") {
  // A thin strip along the positive real axis: directions near 0 are exceptional.
  ComplexGridField mu = make_cell_centred_grid(-4, 4, -4, 4, 256, 256);
  sample_cell_average(mu, 2, [](cplx z) { return z.real() > 0.3 && std::abs(z.imag()) < 0.1 ? cplx(0.2, 0) : cplx(0, 0); });
  const BeltramiSolution s = solve_beltrami(mu);
  const QCSolveReport r = conformal_at_infinity_report(s, mu, exceptional_set_from_support(mu), {1.0, 2.0, 3.5});
  CHECK(r.frames[0].exceptional_measure > r.frames[1].exceptional_measure);
  CHECK(r.frames[1].exceptional_measure > r.frames[2].exceptional_measure);
}

TEST_CASE("psi inversion") {
  const ComplexGridField mu = disk_mu(128, 1.0, 0.5, mu0, 4);
  const BeltramiSolution s = solve_beltrami(mu, {1e-10, 200});
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.05), cplx(0.7, -0.6)}) {
    const cplx zeta = invert_psi(s, z);
    CHECK(std::abs(eval_psi(s, zeta) - z) < 1e-10);
  }
}

TEST_CASE("truncated coefficient of U") {
  const GlueParams gp = glue_constants(BlockIndex(0), BlockIndex(1));
  const SpiralParams sp = make_spiral(gp.k);
  const TruncatedMu t = truncate_mu(gp, sp, {-10, 10, -10, 10}, 64, 64, 2);
  bool any = false;
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) {
      const cplx v = t.mu.at(ix, iy);
      if (v == 0.0) continue;
      any = true;
      // Some sub-sample of the cell lies in X.
      const cplx c = t.mu.node(ix, iy);
      const double h = t.mu.spacing;
      bool hit = false;
      for (double a : {-0.25, 0.25})
        for (double b : {-0.25, 0.25}) hit = hit || in_X(sp, c + cplx(a * h, b * h));
      CHECK(hit);
    }
  CHECK(any);
  CHECK(t.sup_abs_mu < 1.0);
  CHECK(t.discarded_tail > 0.0);
  const GlueParams deg = glue_constants_degenerate(BlockIndex(0));
  const TruncatedMu z = truncate_mu(deg, make_spiral(1.0), {-5, 5, -5, 5}, 32, 32, 2);
  for (const cplx& v : z.mu.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("grid field serialization round trip") {
  ComplexGridField g(cplx(-1.5, 0.25), 0.125, 5, 3);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = cplx(std::sin(i * 0.7), 1.0 / (i + 3.0));
  std::stringstream a;
  write_csv(g, a);
  const ComplexGridField c = read_csv(a);
  CHECK(c.values == g.values);
  CHECK(c.origin == g.origin);
  std::stringstream b;
  write_binary(g, b);
  const ComplexGridField d = read_binary(b);
  CHECK(d.values == g.values);
  CHECK(d.nx == 5);
  CHECK(d.ny == 3);
}

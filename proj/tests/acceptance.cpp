// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fields.hpp"
#include "qcs/qcs.hpp"
#include "qcs_cli/commands.hpp"
#include "qcs_cli/pipeline.hpp"

using namespace qcs;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
  std::printf("%s criterion %d: %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class F>
void criterion(int id, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string what;
  bool pass = false;
  try {
    pass = body(what);
  } catch (const std::exception& e) {
    what += std::string(" exception: ") + e.what();
    pass = false;
  }
  report(id, pass, what, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const std::pair<int, int> kPairs[] = {{0, 1}, {1, 2}, {0, 2}};

}  // namespace

int main() {
  criterion(1, [](std::string& w) {
    const SpiralParams sp = make_spiral(0.2);
    const double e0 = std::abs(sp.mu - cplx(0.9384, 0.2403));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double k = std::exp(u(rng));
      const cplx mu = make_spiral(k).mu;
      const cplx ipi(0.0, pi);
      worst = std::max(worst, std::abs((mu * (std::log(k) - ipi)).real() - (mu * ipi).real()));
      worst = std::max(worst, std::abs((ipi / mu).imag() - pi));
    }
    w = fmt("|mu(1/5) - (0.9384+0.2403i)| = %.2e (<= 1e-3); constraint identities max error %.2e (<= 1e-12)", e0,
            worst);
    return e0 <= 1e-3 && worst <= 1e-12;
  });

  criterion(2, [](std::string& w) {
    bool ok = true;
    std::ostringstream os;
    for (auto [m, n] : kPairs) {
      const GlueParams gp = glue_constants(BlockIndex(m), BlockIndex(n));
      const SpiralParams sp = make_spiral(gp.k);
      const RadialProfile p = composed_logderiv_profile(gp, sp, geometric_radii(1e2, 1e6));
      const OrderFit f = order_fit_top_decades(p);
      const double target = 1.0 + std::pow(std::log(gp.k), 2) / (4 * pi * pi);
      const double rel = std::abs(f.order - target) / target;
      ok = ok && rel <= 0.03;
      os << "(" << m << "," << n << ") " << fmt("%.5f vs %.5f (rel %.1e); ", f.order, target, rel);
    }
    w = "fitted order of m(r, F'/F) up to r = 1e6 within 3%: " + os.str();
    return ok;
  });

  criterion(3, [](std::string& w) {
    bool ok = true;
    std::ostringstream os;
    for (auto [m, n] : kPairs) {
      const GlueParams gp = glue_constants(BlockIndex(m), BlockIndex(n));
      const AsymptoticsReport r = verify_asymptotics(gp, default_asymptotics_grid());
      ok = ok && r.right.slope <= -0.45 && r.left.slope <= -0.9 * gp.delta;
      os << "(" << m << "," << n << ") slopes " << fmt("%.3f / %.3f (<= -0.45 / %.3f); ", r.right.slope, r.left.slope,
                                                       -0.9 * gp.delta);
    }
    const GlueParams gp = glue_constants(BlockIndex(0), BlockIndex(1));
    const double dp = std::abs(phi_prime(gp, 25.0) - 1.0), dm = std::abs(phi_prime(gp, -25.0) - gp.k);
    ok = ok && dp <= 1e-4 && dm <= 1e-4;
    w = os.str() + fmt("(0,1) |phi'(25) - 1| = %.1e, |phi'(-25) - k| = %.1e (<= 1e-4)", dp, dm);
    return ok;
  });

  criterion(4, [](std::string& w) {
    double worst = 0.0;
    const double tol = 1e-12;
    for (auto [m, n] : kPairs) {
      const GlueParams gp = glue_constants(BlockIndex(m), BlockIndex(n), tol);
      const SpiralParams sp = make_spiral(gp.k);
      for (int sign : {1, -1})
        for (int i = 0; i < 500; ++i) {
          const double x = sign * std::pow(10.0, -2.0 + (std::log10(30.0) + 2.0) * i / 499.0);
          worst = std::max(worst, seam_jump(gp, sp, x));
        }
    }
    w = fmt("max seam jump %.2e over 1000 samples per pair (<= %.0e)", worst, 10 * tol);
    return worst <= 10 * tol;
  });

  criterion(5, [](std::string& w) {
    const cli::SuiteResult s = cli::verify_operators(cli::RunConfig{});
    std::ostringstream os;
    bool ok = true;
    for (const cli::Check& c : s.checks) {
      if (c.name == "factorization_2S_eq_B" || c.name == "B_sin_eq_1" || c.name == "B_one_eq_minus_1" ||
          c.name == "recovered_ode_residual" || c.name == "wronskian_drift") {
        ok = ok && c.pass;
        os << c.name << fmt(" %.1e (<= %.0e); ", c.measured, c.limit);
      }
    }
    w = os.str();
    return ok;
  });

  criterion(6, [](std::string& w) {
    HoloFun A;
    A.f = [](cplx) { return cplx(0.25); };
    A.d1 = [](cplx) { return cplx(0.0); };
    const SolutionTrace tr = integrate_ode(A, {cplx(0.5), cplx(20.0)}, std::sin(0.25), 0.5 * std::cos(0.25), 1e-12);
    const std::vector<cplx> zs = locate_trace_zeros(A, tr, 1e-12);
    double zerr = 0.0;
    for (int l = 1; l <= 3; ++l) zerr = std::max(zerr, zs.size() == 3 ? std::abs(zs[l - 1] - 2.0 * pi * l) : 1.0);
    const HoloFun g1 = g_holofun(BlockIndex(1));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-5.0, 0.0), uy(-40.0, 40.0), ul(1.0, 8.0), uh(2.0, 30.0);
    int mism = 0;
    std::ostringstream os;
    for (int i = 0; i < 5; ++i) {
      const double x0 = ux(rng), y0 = uy(rng);
      const ZeroCount zc = count_zeros(g1, {x0, x0 + ul(rng), y0, y0 + uh(rng)});
      const int lattice = static_cast<int>(zeros_g(BlockIndex(1), zc.rect_used, 0.0).size());
      mism += zc.count != lattice;
      os << zc.count << "/" << lattice << " ";
    }
    w = fmt("zeros of sin(z/2) trace at 2 pi l: max error %.1e (<= 1e-8); ", zerr) +
        "argument principle vs lattice on 5 rectangles: " + os.str();
    return zerr <= 1e-8 && mism == 0;
  });

  criterion(7, [](std::string& w) {
    double worst = 0.0;
    for (double r : {10.0, 1e3, 1e5}) {
      const ProximityResult p = proximity_m([](cplx z) { return z.real(); }, r);
      worst = std::max(worst, std::abs(p.value - r / pi) / (r / pi));
    }
    double dev = 0.0;
    for (int m : {1, 2, 3}) {
      std::vector<ZeroRecord> zs;
      for (const cplx& v : roots_P(BlockIndex(m))) {
        const cplx base = std::log(v);
        for (int j = -17000; j <= 17000; ++j) zs.push_back({base + cplx(0.0, 2 * pi * j), 1, 0.0});
      }
      const RadialProfile p = counting_profile(zs, 0, geometric_radii(1e1, 1e4), "N(r,1/g_m)");
      dev = std::max(dev, std::abs(order_fit_top_decades(p).order - 1.0));
    }
    w = fmt("m(r, e^z) relative error %.1e (<= 1e-8); counting order of g_m zeros, m = 1..3, max |order - 1| = %.1e "
            "(<= 0.02)",
            worst, dev);
    return worst <= 1e-8 && dev <= 0.02;
  });

  criterion(8, [](std::string& w) {
    const SpiralParams sp = make_spiral(1.0 / 3.0);
    const double Rs[3] = {10.0, 1e2, 1e3};
    LogAreaResult a[3];
    for (int i = 0; i < 3; ++i) a[i] = log_area(sp, Rs[i]);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double inc = a[i + 1].value - a[i].value, pred = a[i].tail - a[i + 1].tail;
      worst = std::max(worst, std::abs(inc / pred - 1.0));
    }
    w = fmt("log-area %.8f, %.8f, %.8f; decade increments vs O(1/R) tail: max relative mismatch %.2e (<= 0.2)",
            a[0].value, a[1].value, a[2].value, worst);
    return worst <= 0.2;
  });

  criterion(9, [](std::string& w) {
    using namespace testfields;
    const ComplexGridField zero = make_cell_centred_grid(-1, 1, -1, 1, 512, 512);
    const BeltramiSolution s0 = solve_beltrami(zero);
    bool identity = true;
    for (std::size_t i = 0; i < zero.values.size(); ++i)
      identity = identity && s0.psi.values[i] == zero.node(static_cast<int>(i % 512), static_cast<int>(i / 512));
    const double K = 2.0, mu0 = (K - 1) / (K + 1);
    double ed[2], ea[2];
    int i = 0;
    for (int N : {512, 1024}) {
      SolveOptions opt;
      opt.tol = 1e-10;
      ed[i] = disk_error(solve_beltrami(disk_mu(N, 1.0, 0.5, mu0), opt), 0.5, mu0);
      ea[i] = annulus_error(solve_beltrami(annulus_mu(N, 1.0, 0.25, 0.6, mu0), opt), 0.25, 0.6, K);
      ++i;
    }
    w = std::string("mu = 0 identity ") + (identity ? "exact" : "NOT exact") +
        fmt("; 512^2 errors constant %.2e, radial %.2e (<= 0.02); 1024^2 reduction %.2fx, %.2fx (>= 2)", ed[0],
            ea[0], ed[0] / ed[1], ea[0] / ea[1]);
    return identity && ed[0] <= 0.02 && ea[0] <= 0.02 && ed[0] / ed[1] >= 2.0 && ea[0] / ea[1] >= 2.0;
  });

  criterion(10, [](std::string& w) {
    cli::RunConfig cfg;
    cfg.out_dir = (std::filesystem::temp_directory_path() / "qcs_acceptance_pipeline").string();
    const cli::PipelineResult r = cli::run_pipeline(cfg);
    w = fmt("(0,1) 512^2 window 40: CR residual %.2e (<= 1e-2) on %.0f nodes; ", r.cr_max, r.cr_nodes) +
        fmt("%.0f zeros detected (%.0f expected), %.0f non-simple; max |E'-1| %.2e (<= 0.05)",
            static_cast<double>(r.zeros.size()), r.expected_zeros, r.non_simple, r.max_deviation);
    return r.cr_max <= 1e-2 && r.non_simple == 0 && !r.zeros.empty() && r.bank_laine.pass &&
           r.max_deviation <= 0.05;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

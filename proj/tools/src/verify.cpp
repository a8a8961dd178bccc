#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qcs/beltrami.hpp"
#include "qcs/errors.hpp"
#include "qcs/nevanlinna.hpp"
#include "qcs/oscillation.hpp"
#include "qcs/surgery.hpp"
#include "qcs_cli/commands.hpp"

namespace qcs::cli {

namespace {

constexpr double kPi = std::numbers::pi;

Check make_check(std::string name, double measured, double limit, bool pass, std::string detail = {}) {
  return {std::move(name), pass, measured, limit, std::move(detail)};
}
Check at_most(std::string name, double measured, double limit, std::string detail = {}) {
  return make_check(std::move(name), measured, limit, measured <= limit, std::move(detail));
}

HoloFun exp_fun() {
  HoloFun F;
  F.f = [](cplx z) { return std::exp(z); };
  F.d1 = F.d2 = F.d3 = F.f;
  return F;
}
HoloFun tan_fun() {
  HoloFun F;
  F.f = [](cplx z) { return std::tan(z); };
  F.d1 = [](cplx z) { return 1.0 / (std::cos(z) * std::cos(z)); };
  F.d2 = [](cplx z) { return 2.0 * std::tan(z) / (std::cos(z) * std::cos(z)); };
  F.d3 = [](cplx z) {
    const cplx s = 1.0 / (std::cos(z) * std::cos(z)), t = std::tan(z);
    return 2.0 * s * s + 4.0 * t * t * s;
  };
  return F;
}
HoloFun cubic_fun() {
  HoloFun F;
  F.f = [](cplx z) { return z + z * z * z; };
  F.d1 = [](cplx z) { return 1.0 + 3.0 * z * z; };
  F.d2 = [](cplx z) { return 6.0 * z; };
  F.d3 = [](cplx) { return cplx(6.0); };
  return F;
}
HoloFun sin_fun() {
  HoloFun F;
  F.f = [](cplx z) { return std::sin(z); };
  F.d1 = [](cplx z) { return std::cos(z); };
  F.d2 = [](cplx z) { return -std::sin(z); };
  F.d3 = [](cplx z) { return -std::cos(z); };
  return F;
}

// Disc and annulus coefficient fields with closed-form solutions.
ComplexGridField disk_field(int N, double R, double mu0) {
  ComplexGridField g = make_cell_centred_grid(-1, 1, -1, 1, N, N);
  sample_cell_average(g, 16, [&](cplx z) { return std::abs(z) < R ? cplx(mu0) : cplx(0.0); });
  return g;
}
ComplexGridField annulus_field(int N, double r1, double r2, double mu0) {
  ComplexGridField g = make_cell_centred_grid(-1, 1, -1, 1, N, N);
  sample_cell_average(g, 16, [&](cplx z) {
    const double a = std::abs(z);
    return a > r1 && a < r2 ? mu0 * z / std::conj(z) : cplx(0.0);
  });
  return g;
}
template <class Exact, class Mask>
double rel_error(const BeltramiSolution& s, Exact exact, Mask mask) {
  double num = 0.0, den = 0.0;
  for (int iy = 0; iy < s.psi.ny; ++iy)
    for (int ix = 0; ix < s.psi.nx; ++ix) {
      const cplx z = s.psi.node(ix, iy);
      if (!mask(z)) continue;
      const cplx e = exact(z);
      num = std::max(num, std::abs(s.psi.at(ix, iy) - e));
      den = std::max(den, std::abs(e));
    }
  return num / den;
}

}  // namespace

std::vector<std::pair<std::string, HoloFun>> schwarzian_test_set() {
  return {{"exp", exp_fun()}, {"tan", tan_fun()}, {"z+z^3", cubic_fun()}, {"g_1", g_holofun(BlockIndex(1))}};
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::ordered_json SuiteResult::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["measured"] = c.measured;
    e["limit"] = c.limit;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j;
}

SuiteResult verify_asymptotics(const RunConfig& cfg) {
  SuiteResult s{"asymptotics", {}};
  const GlueParams gp = cfg.glue();
  const std::vector<double> grid = default_asymptotics_grid();
  const AsymptoticsReport rep = verify_asymptotics(gp, grid);
  if (rep.degenerate) {
    s.checks.push_back(make_check("degenerate_identity", std::abs(phi(gp, 3.0) - 3.0), 0.0, phi(gp, 3.0) == 3.0));
    return s;
  }
  s.checks.push_back(at_most("right_tail_slope", rep.right.slope, -0.45));
  s.checks.push_back(at_most("left_tail_slope", rep.left.slope, -0.9 * gp.delta));
  s.checks.push_back(at_most("phi_prime_plus_25", std::abs(phi_prime(gp, 25.0) - 1.0), 1e-4));
  s.checks.push_back(at_most("phi_prime_minus_25", std::abs(phi_prime(gp, -25.0) - gp.k), 1e-4));
  double worst = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    const double y = phi(gp, x);
    worst = std::max(worst, glue_residual(gp, x, y) / std::max(1.0, std::abs(loglog_g(gp.m, x))));
  }
  s.checks.push_back(at_most("defining_identity", worst, 10.0 * gp.tol));
  return s;
}

SuiteResult verify_seams(const RunConfig& cfg) {
  SuiteResult s{"seams", {}};
  const GlueParams gp = cfg.glue();
  const SpiralParams sp = make_spiral(gp.k);
  const int half = cfg.seam_samples / 2;
  const double u0 = -2.0, u1 = std::log10(30.0);
  double worst = 0.0, where = 0.0;
  int over = 0;
  const double limit = 10.0 * kReferencePhiTol;
  for (int sign : {1, -1})
    for (int i = 0; i < half; ++i) {
      const double x = sign * std::pow(10.0, u0 + (u1 - u0) * i / (half - 1));
      const double j = seam_jump(gp, sp, x);
      if (j > limit) ++over;
      if (j > worst) {
        worst = j;
        where = x;
      }
    }
  std::ostringstream os;
  os.precision(17);
  os << "max at x = " << where << " (" << (where > 0 ? "Gamma'" : "Gamma") << "); " << over << " of "
     << 2 * half << " samples above the limit; phi tolerance " << gp.tol;
  s.checks.push_back(at_most("max_seam_jump", worst, limit, os.str()));
  return s;
}

SuiteResult verify_operators(const RunConfig&) {
  SuiteResult s{"operators", {}};
  const cplx pts[] = {{0.37, 0.41}, {-0.8, 0.25}, {1.1, -0.6}, {0.2, 1.3}};
  double worst = 0.0;
  for (const auto& [name, F] : schwarzian_test_set()) {
    const HoloFun E = ratio_over_derivative(F);
    for (cplx z : pts) {
      const cplx S2 = 2.0 * schwarzian(F, z), B = bank_laine_B(E, z);
      worst = std::max(worst, std::abs(S2 - B) / std::max(1.0, std::abs(S2)));
    }
  }
  s.checks.push_back(at_most("factorization_2S_eq_B", worst, 1e-6));

  HoloFun one;
  one.f = [](cplx) { return cplx(1.0); };
  one.d1 = one.d2 = one.d3 = [](cplx) { return cplx(0.0); };
  double bs = 0.0, b1 = 0.0;
  for (cplx z : pts) {
    bs = std::max(bs, std::abs(bank_laine_B(sin_fun(), z) - 1.0));
    b1 = std::max(b1, std::abs(bank_laine_B(one, z) + 1.0));
  }
  s.checks.push_back(at_most("B_sin_eq_1", bs, 1e-10));
  s.checks.push_back(at_most("B_one_eq_minus_1", b1, 1e-10));

  double ode_res = 0.0, wdrift = 0.0, prod = 0.0, trace_dev = 0.0;
  const Polyline path = {cplx(0.1, 0.1), cplx(1.2, 0.4), cplx(0.5, 1.5), cplx(-1.0, 0.8)};
  for (const HoloFun& F : {exp_fun(), tan_fun()}) {
    const RecoveredPair rp = recover_solutions(F, path, 64);
    const cplx W0 = rp.samples.front().wronskian;
    HoloFun A;
    A.f = [F](cplx z) { return 0.5 * schwarzian(F, z); };
    for (const PathSample& p : rp.samples) {
      wdrift = std::max(wdrift, std::abs(p.wronskian - W0));
      const cplx E = F(p.z) / F.derivative(1, p.z);
      prod = std::max(prod, std::abs(p.w1 * p.w2 - E) / std::max(1.0, std::abs(E)));
      const double d = 1e-4;
      const cplx w1pp = (rp.at(p.z + d).w1p - rp.at(p.z - d).w1p) / (2.0 * d);
      const cplx Aw = A(p.z) * p.w1;
      ode_res = std::max(ode_res, std::abs(w1pp + Aw) / std::max({1.0, std::abs(w1pp), std::abs(Aw)}));
    }
    const PathSample& st = rp.samples.front();
    const SolutionTrace tr = integrate_ode(A, path, st.w1, st.w1p, 1e-11);
    for (const TracePoint& tp : tr.points) {
      const PathSample q = rp.at(tp.z);
      trace_dev = std::max(trace_dev, std::abs(tp.w - q.w1) / std::max(1.0, std::abs(q.w1)));
    }
  }
  s.checks.push_back(at_most("recovered_ode_residual", std::max(ode_res, trace_dev), 1e-6));
  s.checks.push_back(at_most("wronskian_drift", wdrift, 1e-9));
  s.checks.push_back(at_most("E_eq_w1_w2", prod, 1e-10));

  HoloFun quarter;
  quarter.f = [](cplx) { return cplx(0.25); };
  quarter.d1 = [](cplx) { return cplx(0.0); };
  const SolutionTrace tr = integrate_ode(quarter, {cplx(0.0), cplx(13.0, 0.0)}, 0.0, 0.5, 1e-12);
  const std::vector<cplx> zs = locate_trace_zeros(quarter, tr, 1e-12);
  double zerr = 0.0;
  for (const cplx& z : zs) zerr = std::max(zerr, std::abs(z - 2 * kPi * std::round(z.real() / (2 * kPi))));
  s.checks.push_back(make_check("ode_zeros_2pi_l", zerr, 1e-8, zerr <= 1e-8 && zs.size() == 3,
                                std::to_string(zs.size()) + " zeros on [0, 13]"));

  const HoloFun g1 = g_holofun(BlockIndex(1));
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ux(-4.0, 0.0), uy(-30.0, 30.0), ul(1.0, 6.0), uh(2.0, 20.0);
  int mismatches = 0;
  std::ostringstream det;
  for (int i = 0; i < 5; ++i) {
    const double x0 = ux(rng), y0 = uy(rng);
    const Rect r{x0, x0 + ul(rng), y0, y0 + uh(rng)};
    const ZeroCount zc = count_zeros(g1, r);
    const int lattice = static_cast<int>(zeros_g(BlockIndex(1), zc.rect_used, 0.0).size());
    if (zc.count != lattice) ++mismatches;
    det << (i ? "; " : "") << zc.count << "/" << lattice;
  }
  s.checks.push_back(make_check("argument_principle_g1", mismatches, 0, mismatches == 0, det.str()));

  std::vector<ZeroRecord> sz;
  for (int k = -4; k <= 4; ++k) sz.push_back({k * kPi, 1, std::cos(k * kPi)});
  const BankLaineReport bl = check_bank_laine(sin_fun(), sz, false);
  s.checks.push_back(make_check("bank_laine_sin", bl.max_deviation, 1e-6,
                                bl.pass && bl.plus_count == 5 && bl.minus_count == 4));
  HoloFun sq;
  sq.f = [](cplx z) { return z * z; };
  sq.d1 = [](cplx z) { return 2.0 * z; };
  s.checks.push_back(
      make_check("bank_laine_z2_rejected", 0.0, 0.0, !check_bank_laine(sq, {{0.0, 2, 0.0}}, false).pass));
  return s;
}

SuiteResult verify_nevanlinna(const RunConfig& cfg) {
  SuiteResult s{"nevanlinna", {}};
  double worst = 0.0;
  for (double r : {10.0, 1e3, 1e5}) {
    const ProximityResult p = proximity_m([](cplx z) { return z.real(); }, r);
    worst = std::max(worst, std::abs(p.value - r / kPi) / (r / kPi));
  }
  s.checks.push_back(at_most("m_r_exp", worst, 1e-8));

  for (int m : {1, 2, 3}) {
    std::vector<ZeroRecord> zs;
    const double R = 1e5;
    for (const cplx& v : roots_P(BlockIndex(m))) {
      const cplx base = std::log(v);
      const int J = static_cast<int>(R / (2 * kPi)) + 2;
      for (int j = -J; j <= J; ++j) zs.push_back({base + cplx(0.0, 2 * kPi * j), 1, 0.0});
    }
    const RadialProfile p = counting_profile(zs, 0, geometric_radii(1e1, 1e4), "N(r, 1/g_m)");
    const double order = order_fit_top_decades(p).order;
    s.checks.push_back(at_most("counting_order_g" + std::to_string(m), std::abs(order - 1.0), 0.02,
                               "order " + std::to_string(order)));
  }

  double jensen = 0.0;
  auto las = [](cplx z) { return std::log(std::abs(std::sin(z))); };
  auto lac = [](cplx z) { return std::log(std::abs(std::cos(z))); };
  for (double r : {10.0, 50.0, 200.0}) {
    std::vector<ZeroRecord> zeros, poles;
    for (int k = 1; k * kPi <= r + 1; ++k) zeros.push_back({k * kPi, 1, 0.0}), zeros.push_back({-k * kPi, 1, 0.0});
    for (int k = 0; (k + 0.5) * kPi <= r + 1; ++k)
      poles.push_back({(k + 0.5) * kPi, 1, 0.0}), poles.push_back({-(k + 0.5) * kPi, 1, 0.0});
    const double Ns = counting_N(zeros, 1, r), Np = counting_N(poles, 0, r);
    const double ms = proximity_m(las, r).value, mis = proximity_m([&](cplx z) { return -las(z); }, r).value;
    jensen = std::max(jensen, std::abs(ms - (mis + Ns)) / ms);
    const double Tt = proximity_m([&](cplx z) { return las(z) - lac(z); }, r).value + Np;
    const double Ti = proximity_m([&](cplx z) { return lac(z) - las(z); }, r).value + Ns;
    jensen = std::max(jensen, std::abs(Tt - Ti) / Tt);
    const double Te = proximity_m([](cplx z) { return z.real(); }, r).value;
    jensen = std::max(jensen, std::abs(Te - r / kPi) / Te);
  }
  s.checks.push_back(at_most("jensen_consistency", jensen, 0.01));

  std::vector<cplx> samples;
  for (double x : {10.0, 20.0, 40.0})
    for (double y : {-7.0, 0.5, 3.0, 11.0}) samples.push_back({x, y});
  for (double x : {-5.0, -20.0}) samples.push_back({x, 1.0});
  double x1 = 0.0;
  for (int m : {0, 1, 2}) x1 = std::max(x1, x1_check(BlockIndex(m), samples).max_deviation);
  s.checks.push_back(at_most("x1_log_derivative_growth", x1, 0.05));

  if (!cfg.degenerate) {
    const GlueParams gp = cfg.glue();
    const SpiralParams sp = make_spiral(gp.k);
    std::vector<ZeroRecord> uz;
    for (const UZero& z : zeros_of_U(gp, sp, 3e3)) uz.push_back({z.w, 1, 0.0});
    const RadialProfile q = counting_profile(uz, 0, geometric_radii(3e1, 3e3), "N(r, 1/U)");
    const double order = order_fit_top_decades(q).order, rho = 1.0 / sp.re_mu;
    s.checks.push_back(at_most("counting_order_U", order, rho * 1.02, "rho " + std::to_string(rho)));
  }
  return s;
}

SuiteResult verify_beltrami(const RunConfig& cfg) {
  SuiteResult s{"beltrami", {}};
  {
    const ComplexGridField mu = make_cell_centred_grid(-1, 1, -1, 1, 64, 64);
    const BeltramiSolution sol = solve_beltrami(mu);
    double dev = 0.0;
    for (int iy = 0; iy < 64; ++iy)
      for (int ix = 0; ix < 64; ++ix) dev = std::max(dev, std::abs(sol.psi.at(ix, iy) - mu.node(ix, iy)));
    s.checks.push_back(make_check("zero_mu_identity", dev, 0.0, dev == 0.0));
  }
  const double K = 2.0, mu0 = (K - 1) / (K + 1), R = 0.5, r1 = 0.25, r2 = 0.6;
  double ed[2], ea[2];
  const int sizes[2] = {cfg.verify_grid, 2 * cfg.verify_grid};
  SolveOptions opt;
  opt.tol = 1e-10;
  for (int i = 0; i < 2; ++i) {
    const BeltramiSolution sd = solve_beltrami(disk_field(sizes[i], R, mu0), opt);
    ed[i] = rel_error(
        sd, [&](cplx z) { return z + mu0 * std::conj(z); }, [&](cplx z) { return std::abs(z) < 0.8 * R; });
    const BeltramiSolution sa = solve_beltrami(annulus_field(sizes[i], r1, r2, mu0), opt);
    ea[i] = rel_error(
        sa, [&](cplx z) { return z * std::pow(std::clamp(std::abs(z), r1, r2) / r2, K - 1.0); },
        [&](cplx z) { return std::abs(z) > 1.1 * r1 && std::abs(z) < 0.9 * r2; });
  }
  for (int i = 0; i < 2; ++i) {
    const std::string tag = std::to_string(sizes[i]);
    s.checks.push_back(at_most("constant_stretch_error_" + tag, ed[i], 0.02));
    s.checks.push_back(at_most("radial_stretch_error_" + tag, ea[i], 0.02));
  }
  s.checks.push_back(make_check("constant_stretch_refinement", ed[0] / ed[1], 2.0, ed[0] / ed[1] >= 2.0));
  s.checks.push_back(make_check("radial_stretch_refinement", ea[0] / ea[1], 2.0, ea[0] / ea[1] >= 2.0));
  return s;
}

}  // namespace qcs::cli

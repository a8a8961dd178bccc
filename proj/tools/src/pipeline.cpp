#include "qcs_cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "qcs/errors.hpp"
#include "qcs/parallel.hpp"
#include "qcs/surgery.hpp"

namespace qcs::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from w to the seams of U (the curves where mu_U jumps), measured
// in the h-plane and scaled to the w-plane by 1/|h'|.
double seam_distance(const SpiralParams& sp, cplx w) {
  const Region r = classify(sp, w);
  if (r == Region::origin || r == Region::gamma || r == Region::gamma_prime) return 0.0;
  const cplx zeta = inverse_h(sp, w);
  const double hp = std::abs(zeta * sp.inv_mu / w);
  const double x = zeta.real(), y = zeta.imag();
  double d;
  if (r == Region::g_plus) {
    d = y;
  } else {
    d = std::min(std::abs(y), std::abs(y + 1.0));
    // The vertical segment Re zeta = 0, -1 < Im zeta < 0 where tau switches formula.
    const double dy = y > 0.0 ? y : (y < -1.0 ? y + 1.0 : 0.0);
    d = std::min(d, std::hypot(x, dy));
  }
  return d / hp;
}

double max_finite(double a, double b) { return std::isfinite(b) ? std::max(a, b) : a; }

}  // namespace

FHat::FHat(const GlueParams& gp, const SpiralParams& sp, const BeltramiSolution& sol) : gp_(gp), sp_(sp), sol_(sol) {}

FHat::Point FHat::eval(cplx z) const {
  Point p;
  p.w = invert_psi(sol_, z);
  p.a = sol_.dpsi.interpolate(p.w);
  p.b = sol_.dbarpsi.interpolate(p.w);
  const UValue u = eval_U(gp_, sp_, p.w);
  if (u.zero) {
    p.zero = true;
    return p;
  }
  p.value = u.value;  // U(0) = 1 at the origin
  if (u.origin) return p;
  ULogDerivs L;
  try {
    L = U_log_derivatives(gp_, sp_, p.w);
  } catch (const DomainError&) {
    return p;
  }
  const double J = std::norm(p.a) - std::norm(p.b);
  p.dlog = (L.dz * std::conj(p.a) - L.dzbar * std::conj(p.b)) / J;
  p.dbarlog = (L.dzbar * p.a - L.dz * p.b) / J;
  p.cr = std::abs(p.dbarlog) / std::abs(p.dlog);
  p.has_derivs = true;
  return p;
}

cplx FHat::E(cplx z) const {
  const Point p = eval(z);
  if (p.zero) return 0.0;
  if (!p.has_derivs) throw DomainError("FHat::E: derivative undefined at a seam or the origin");
  return 1.0 / p.dlog;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult R;
  const GlueParams gp = cfg.glue();
  const SpiralParams sp = make_spiral(gp.k);
  const double L = cfg.window;
  const int N = cfg.grid;

  R.mu = truncate_mu(gp, sp, {-L, L, -L, L}, N, N, cfg.subsamples, cfg.workers);
  R.sol = solve_beltrami(R.mu.mu, {cfg.solver_tol, cfg.max_iter});
  R.qc = conformal_at_infinity_report(R.sol, R.mu.mu, exceptional_set_from_support(R.mu.mu));

  const ComplexGridField& grid = R.sol.psi;
  const double h = grid.spacing;
  const double inner = L - cfg.boundary_margin * L;
  auto in_region = [&](cplx z) { return std::abs(z.real()) <= inner && std::abs(z.imag()) <= inner; };
  const double origin_radius = 4.0 * h;
  const double seam_min = cfg.seam_margin * h;

  R.log_F = ComplexGridField(grid.origin, h, grid.nx, grid.ny);
  R.E = R.log_F;
  R.cr = R.log_F;
  std::vector<unsigned char> cr_ok(grid.values.size(), 0), is_zero(grid.values.size(), 0);
  std::vector<double> dlog_abs(grid.values.size(), kNaN);
  const FHat fh(gp, sp, R.sol);

  parallel_for(static_cast<std::size_t>(grid.ny), cfg.workers, [&](std::size_t row) {
    const int iy = static_cast<int>(row);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const std::size_t k = grid.index(ix, iy);
      const cplx z = grid.node(ix, iy);
      R.log_F.values[k] = {kNaN, kNaN};
      R.E.values[k] = {kNaN, kNaN};
      R.cr.values[k] = {kNaN, 0.0};
      FHat::Point p;
      try {
        p = fh.eval(z);
      } catch (const std::exception&) {
        continue;
      }
      if (p.zero) {
        is_zero[k] = 1;
        R.E.values[k] = 0.0;
        continue;
      }
      R.log_F.values[k] = p.value.log();
      if (!p.has_derivs) continue;
      R.E.values[k] = 1.0 / p.dlog;
      dlog_abs[k] = std::abs(p.dlog);
      if (!in_region(z) || std::abs(p.w) < origin_radius || seam_distance(sp, p.w) < seam_min) continue;
      R.cr.values[k] = {p.cr, 0.0};
      cr_ok[k] = 1;
    }
  });

  // Deterministic reductions in index order.
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    if (!in_region(grid.node(static_cast<int>(k % grid.nx), static_cast<int>(k / grid.nx)))) continue;
    if (!cr_ok[k]) {
      ++R.cr_excluded;
      continue;
    }
    ++R.cr_nodes;
    if (R.cr.values[k].real() > R.cr_max) {
      R.cr_max = R.cr.values[k].real();
      R.cr_argmax = grid.node(static_cast<int>(k % grid.nx), static_cast<int>(k / grid.nx));
    }
  }

  // Finite-difference residual of log F-hat where one grid step resolves it.
  for (int iy = 1; iy + 1 < grid.ny; ++iy)
    for (int ix = 1; ix + 1 < grid.nx; ++ix) {
      const std::size_t k = grid.index(ix, iy);
      if (!cr_ok[k] || !(dlog_abs[k] * h < 0.05)) continue;
      const cplx e = R.log_F.at(ix + 1, iy), w = R.log_F.at(ix - 1, iy);
      const cplx nn = R.log_F.at(ix, iy + 1), s = R.log_F.at(ix, iy - 1);
      if (!std::isfinite(e.real()) || !std::isfinite(w.real()) || !std::isfinite(nn.real()) ||
          !std::isfinite(s.real()))
        continue;
      const cplx dx((e.real() - w.real()) / (2 * h), wrap_angle(e.imag() - w.imag()) / (2 * h));
      const cplx dy((nn.real() - s.real()) / (2 * h), wrap_angle(nn.imag() - s.imag()) / (2 * h));
      const cplx d = 0.5 * (dx - cplx(0, 1) * dy), db = 0.5 * (dx + cplx(0, 1) * dy);
      R.fd_cr_max = max_finite(R.fd_cr_max, std::abs(db) / std::abs(d));
      ++R.fd_cr_nodes;
    }

  // Zeros: winding of arg F-hat around each cell inside the region. Increments between
  // samples are unwrapped against the step predicted by the log-derivative; cells where the
  // phase turns too fast to sample are left unresolved.
  auto cell_winding = [&](int ix, int iy, int& wn) {
    const cplx c[4] = {grid.node(ix, iy), grid.node(ix + 1, iy), grid.node(ix + 1, iy + 1), grid.node(ix, iy + 1)};
    double rot = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = dlog_abs[grid.index(ix + (i == 1 || i == 2), iy + (i >= 2))];
      rot = std::isfinite(d) ? std::max(rot, d * h) : kInf;
    }
    if (rot < 0.25 * kPi) {
      double sum = 0.0;
      bool fast = true;
      for (int i = 0; i < 4 && fast; ++i) {
        const cplx v0 = R.log_F.at(ix + (i == 1 || i == 2), iy + (i >= 2));
        const cplx v1 = R.log_F.at(ix + (i == 0 || i == 1), iy + (i >= 1 && i <= 2));
        const double d = wrap_angle(v1.imag() - v0.imag());
        fast = std::isfinite(d) && std::abs(d) < 0.5 * kPi;
        sum += d;
      }
      if (fast) {
        wn = static_cast<int>(std::lround(sum / (2 * kPi)));
        return true;
      }
    }
    int s0 = 8;
    if (std::isfinite(rot)) s0 = std::max(s0, static_cast<int>(std::ceil(rot / (0.125 * kPi))));
    for (int s = s0; s <= 1024; s *= 2) {
      double sum = 0.0;
      FHat::Point prev;
      bool ok = true;
      for (int j = 0; j <= 4 * s && ok; ++j) {
        const int side = std::min(j / s, 3);
        const double frac = j == 4 * s ? 1.0 : double(j - side * s) / s;
        const cplx z = c[side] + (c[(side + 1) % 4] - c[side]) * frac;
        FHat::Point p;
        try {
          p = fh.eval(z);
        } catch (const std::exception&) {
          ok = false;
          break;
        }
        if (p.zero || !std::isfinite(p.value.arg) || std::abs(p.value.log_mod) > 1e12) {
          ok = false;
          break;
        }
        p.w = z;
        if (j > 0) {
          const cplx dz = z - prev.w;
          double pred = 0.0;
          if (prev.has_derivs && p.has_derivs)
            pred = (0.5 * (prev.dlog + p.dlog) * dz + 0.5 * (prev.dbarlog + p.dbarlog) * std::conj(dz)).imag();
          const double corr = wrap_angle(p.value.arg - prev.value.arg - pred);
          if (std::abs(corr) >= 0.25 * kPi || std::abs(pred) >= 0.5 * kPi) {
            ok = false;
            break;
          }
          sum += pred + corr;
        }
        prev = p;
      }
      if (ok) {
        wn = static_cast<int>(std::lround(sum / (2 * kPi)));
        return true;
      }
    }
    return false;
  };

  struct Cand {
    int ix, iy, wn;
  };
  std::vector<std::vector<Cand>> per_row(grid.ny);
  std::vector<int> unresolved(grid.ny, 0);
  parallel_for(static_cast<std::size_t>(grid.ny - 1), cfg.workers, [&](std::size_t row) {
    const int iy = static_cast<int>(row);
    for (int ix = 0; ix + 1 < grid.nx; ++ix) {
      if (!in_region(grid.node(ix, iy)) || !in_region(grid.node(ix + 1, iy + 1))) continue;
      int wn = 0;
      if (!cell_winding(ix, iy, wn)) {
        ++unresolved[row];
        continue;
      }
      if (wn != 0) per_row[row].push_back({ix, iy, wn});
    }
  });
  for (int u : unresolved) R.unresolved_cells += u;

  const std::vector<UZero> exact = zeros_of_U(gp, sp, std::sqrt(2.0) * L + 1.0);
  std::vector<cplx> exact_z;
  for (const UZero& u : exact) {
    const cplx z = eval_psi(R.sol, u.w);
    if (in_region(z)) exact_z.push_back(z);
  }
  R.expected_zeros = static_cast<int>(exact_z.size());

  // F-hat is smooth inside a cell of the interpolants, so a short step measures its own derivative.
  const double delta = 1e-3 * h;
  for (const auto& row : per_row)
    for (const Cand& c : row) {
      cplx z = grid.node(c.ix, c.iy) + cplx(0.5 * h, 0.5 * h);
      for (int it = 0; it < 60; ++it) {
        cplx step;
        try {
          step = fh.E(z);
        } catch (const DomainError&) {
          break;
        }
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        // Damped so a flat spot of F-hat cannot throw the iterate out of the grid.
        if (std::abs(step) > h) step *= h / std::abs(step);
        z -= step;
        if (std::abs(step) <= 1e-12 * (1.0 + std::abs(z))) break;
      }
      bool dup = false;
      for (const PipelineZero& q : R.zeros) dup = dup || std::abs(q.z - z) < 0.5 * h;
      if (dup) continue;
      PipelineZero pz;
      pz.z = z;
      pz.winding = c.wn;
      if (c.wn != 1) ++R.non_simple;
      try {
        pz.ep_x = (fh.E(z + delta) - fh.E(z - delta)) / (2.0 * delta);
        pz.ep_y = (fh.E(z + cplx(0, delta)) - fh.E(z - cplx(0, delta))) / cplx(0, 2.0 * delta);
        pz.deviation = std::max(std::abs(pz.ep_x - 1.0), std::abs(pz.ep_y - 1.0));
      } catch (const DomainError&) {
        pz.ep_x = pz.ep_y = {kNaN, kNaN};
        pz.deviation = std::numeric_limits<double>::infinity();
      }
      pz.exact_offset = std::numeric_limits<double>::infinity();
      for (const cplx& e : exact_z) pz.exact_offset = std::min(pz.exact_offset, std::abs(e - z));
      R.max_deviation = std::max(R.max_deviation, pz.deviation);
      R.zeros.push_back(pz);
    }
  std::sort(R.zeros.begin(), R.zeros.end(), [](const PipelineZero& a, const PipelineZero& b) {
    return std::abs(a.z) != std::abs(b.z) ? std::abs(a.z) < std::abs(b.z) : std::arg(a.z) < std::arg(b.z);
  });

  HoloFun Ef;
  Ef.f = [&fh](cplx z) { return fh.E(z); };
  Ef.d1 = [&fh, delta](cplx z) { return (fh.E(z + delta) - fh.E(z - delta)) / (2.0 * delta); };
  std::vector<ZeroRecord> recs;
  for (const PipelineZero& z : R.zeros) recs.push_back({z.z, std::max(1, z.winding), z.ep_x});
  R.bank_laine = check_bank_laine(Ef, recs, true, cfg.bl_tol);

  R.pass = R.cr_max <= cfg.cr_tol && R.non_simple == 0 && R.bank_laine.pass && R.max_deviation <= cfg.bl_tol;
  R.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

nlohmann::ordered_json pipeline_report(const RunConfig& cfg, const PipelineResult& r) {
  using J = nlohmann::ordered_json;
  auto c = [](cplx z) { return J::array({z.real(), z.imag()}); };
  J j;
  j["command"] = "pipeline";
  j["timestamp"] = timestamp();
  j["config"] = cfg.to_json();
  j["pass"] = r.pass;
  j["mu"] = {{"sup_abs_mu", r.mu.sup_abs_mu},
             {"window_log_area", r.mu.window_log_area},
             {"discarded_tail", r.mu.discarded_tail}};
  j["solver"] = {{"iterations", r.qc.iterations},   {"residual", r.qc.residual},
                 {"fd_residual", r.qc.fd_residual}, {"sup_dev", r.qc.sup_dev},
                 {"deriv_dev", r.qc.deriv_dev},     {"mu_sup", r.qc.mu_sup},
                 {"symbol_max", r.qc.symbol_max},   {"min_jacobian", min_jacobian_determinant(r.sol.psi)}};
  J frames = J::array();
  for (const FrameReport& f : r.qc.frames)
    frames.push_back({{"radius", f.radius}, {"sup_dev", f.sup_dev}, {"exceptional_measure", f.exceptional_measure}});
  j["solver"]["frames"] = frames;
  j["cauchy_riemann"] = {{"max", r.cr_max},           {"argmax", c(r.cr_argmax)},
                         {"tolerance", cfg.cr_tol},   {"nodes", r.cr_nodes},
                         {"excluded", r.cr_excluded}, {"fd_max", r.fd_cr_max},
                         {"fd_nodes", r.fd_cr_nodes}};
  J zs = J::array();
  for (const PipelineZero& z : r.zeros)
    zs.push_back({{"z", c(z.z)},
                  {"winding", z.winding},
                  {"Ep_x", c(z.ep_x)},
                  {"Ep_y", c(z.ep_y)},
                  {"deviation", z.deviation},
                  {"exact_offset", z.exact_offset}});
  J viol = J::array();
  for (const BankLaineViolation& v : r.bank_laine.violations)
    viol.push_back({{"z", c(v.location)}, {"Ep", c(v.derivative)}, {"reason", v.reason}});
  j["zeros"] = {{"detected", r.zeros.size()}, {"expected", r.expected_zeros}, {"non_simple", r.non_simple},
                {"unresolved_cells", r.unresolved_cells}, {"max_deviation", r.max_deviation},
                {"tolerance", cfg.bl_tol}, {"list", zs}};
  j["bank_laine"] = {{"pass", r.bank_laine.pass},
                     {"plus", r.bank_laine.plus_count},
                     {"minus", r.bank_laine.minus_count},
                     {"violations", viol}};
  return j;
}

}  // namespace qcs::cli

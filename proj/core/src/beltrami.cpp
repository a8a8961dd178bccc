#include "qcs/beltrami.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qcs/errors.hpp"
#include "qcs/parallel.hpp"

namespace qcs {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Edge antiderivatives for the contour form of the integral of 1/zeta.
double Hx(double x, double y) {
  const double r2 = x * x + y * y;
  double v = -2.0 * x;
  if (x != 0.0) v += x * std::log(r2);
  if (y != 0.0) v += 2.0 * y * std::atan(x / y);
  return v;
}

double Vy(double x, double y) {
  const double r2 = x * x + y * y;
  double v = -2.0 * y;
  if (y != 0.0) v += y * std::log(r2);
  if (x != 0.0) v += 2.0 * x * std::atan(y / x);
  return v;
}

class Fft2 {
 public:
  Fft2(int mx, int my) : mx_(mx), my_(my) {
    const std::size_t n = static_cast<std::size_t>(mx) * my;
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lk(planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(buf_);
    fwd_ = fftw_plan_dft_2d(my, mx, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(my, mx, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::complex<double>* data() { return buf_; }
  std::size_t size() const { return static_cast<std::size_t>(mx_) * my_; }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int mx_, my_;
  std::complex<double>* buf_ = nullptr;
  fftw_plan fwd_{}, bwd_{};
};

// Free-space convolution with precomputed kernel spectra on a 2nx x 2ny grid.
class Convolver {
 public:
  Convolver(int nx, int ny, double h) : nx_(nx), ny_(ny), mx_(2 * nx), my_(2 * ny), fft_(mx_, my_) {
    kc_.resize(fft_.size());
    ks_.resize(fft_.size());
    build(h);
  }

  void apply(const std::vector<cplx>& kernel_hat, const std::vector<cplx>& w, std::vector<cplx>& out) {
    cplx* b = fft_.data();
    std::fill(b, b + fft_.size(), cplx(0.0, 0.0));
    for (int iy = 0; iy < ny_; ++iy)
      std::copy_n(w.data() + static_cast<std::size_t>(iy) * nx_, nx_, b + static_cast<std::size_t>(iy) * mx_);
    fft_.forward();
    for (std::size_t i = 0; i < fft_.size(); ++i) b[i] *= kernel_hat[i];
    fft_.backward();
    const double scale = 1.0 / static_cast<double>(fft_.size());
    out.resize(w.size());
    for (int iy = 0; iy < ny_; ++iy)
      for (int ix = 0; ix < nx_; ++ix)
        out[static_cast<std::size_t>(iy) * nx_ + ix] = b[static_cast<std::size_t>(iy) * mx_ + ix] * scale;
  }

  const std::vector<cplx>& cauchy() const { return kc_; }
  const std::vector<cplx>& beurling() const { return ks_; }

 private:
  void build(double h) {
    cplx* b = fft_.data();
    for (int pass = 0; pass < 2; ++pass) {
      for (int jy = 0; jy < my_; ++jy) {
        const int dy = jy < ny_ ? jy : jy - my_;
        for (int jx = 0; jx < mx_; ++jx) {
          const int dx = jx < nx_ ? jx : jx - mx_;
          cplx v = 0.0;
          if (dx != 0 || dy != 0) {
            const cplx d(dx, dy);
            v = pass == 0 ? h * cell_integral_inv(d) / kPi : -cell_integral_inv2(d) / kPi;
          }
          b[static_cast<std::size_t>(jy) * mx_ + jx] = v;
        }
      }
      fft_.forward();
      std::copy(b, b + fft_.size(), (pass == 0 ? kc_ : ks_).begin());
    }
  }

  int nx_, ny_, mx_, my_;
  Fft2 fft_;
  std::vector<cplx> kc_, ks_;
};

cplx fd_d(const ComplexGridField& f, int ix, int iy, cplx* dbar) {
  const double h = f.spacing;
  const cplx fx = (f.at(ix + 1, iy) - f.at(ix - 1, iy)) / (2.0 * h);
  const cplx fy = (f.at(ix, iy + 1) - f.at(ix, iy - 1)) / (2.0 * h);
  if (dbar) *dbar = 0.5 * (fx + cplx(0, 1) * fy);
  return 0.5 * (fx - cplx(0, 1) * fy);
}

}  // namespace

cplx cell_integral_inv(cplx d) {
  const double ax = std::abs(d.real()), ay = std::abs(d.imag());
  if (std::max(ax, ay) > 16.0) {
    // Midpoint rule with the only non-vanishing corrections for analytic f.
    const cplx r = 1.0 / d;
    const cplx r4 = r * r * r * r;
    return r * (1.0 - r4 / 60.0 + r4 * r4 / 720.0);
  }
  const double x0 = d.real() - 0.5, x1 = d.real() + 0.5, y0 = d.imag() - 0.5, y1 = d.imag() + 0.5;
  const cplx tot = (Hx(x1, y0) - Hx(x0, y0)) + cplx(0, -1) * (Vy(x1, y1) - Vy(x1, y0)) +
                   (Hx(x0, y1) - Hx(x1, y1)) + cplx(0, -1) * (Vy(x0, y0) - Vy(x0, y1));
  return cplx(0, 0.5) * tot;
}

cplx cell_integral_inv2(cplx d) {
  const double ax = std::abs(d.real()), ay = std::abs(d.imag());
  if (std::max(ax, ay) > 16.0) {
    const cplx r = 1.0 / d;
    const cplx r2 = r * r, r4 = r2 * r2;
    return r2 * (1.0 - r4 / 12.0 + r4 * r4 / 80.0);
  }
  const cplx c[4] = {d + cplx(-0.5, -0.5), d + cplx(0.5, -0.5), d + cplx(0.5, 0.5), d + cplx(-0.5, 0.5)};
  cplx tot = 0.0;
  for (int i = 0; i < 4; ++i) {
    const cplx a = c[i], b = c[(i + 1) % 4];
    tot += std::conj(b - a) / (b - a) * std::log(b / a);
  }
  return cplx(0, -0.5) * tot;
}

TruncatedMu truncate_mu(const GlueParams& gp, const SpiralParams& sp, const Rect& window, int nx, int ny,
                        int subsamples, int workers) {
  TruncatedMu out;
  out.mu = make_cell_centred_grid(window.x0, window.x1, window.y0, window.y1, nx, ny);
  auto f = [&](cplx w) -> cplx {
    if (w == 0.0 || !in_X(sp, w)) return 0.0;
    try {
      return beltrami_of_U(gp, sp, w).mu_val;
    } catch (const DomainError&) {
      return 0.0;
    }
  };
  sample_cell_average(out.mu, subsamples, f, workers);
  for (const cplx& v : out.mu.values) out.sup_abs_mu = std::max(out.sup_abs_mu, std::abs(v));
  const double Rz = std::min({-window.x0, window.x1, -window.y0, window.y1});
  if (Rz > 1.0) {
    const double Rzeta = std::pow(Rz * std::exp(-std::abs(sp.im_mu) * kPi), sp.rho);
    if (Rzeta > 1.0) {
      const LogAreaResult la = log_area(sp, Rzeta);
      out.window_log_area = la.value;
      out.discarded_tail = la.tail;
    }
  }
  return out;
}

BeltramiSolution solve_beltrami(const ComplexGridField& mu, const SolveOptions& opts) {
  mu.validate();
  double mu_sup = 0.0;
  for (const cplx& v : mu.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("solve_beltrami: non-finite coefficient");
    mu_sup = std::max(mu_sup, std::abs(v));
  }
  if (mu_sup >= 1.0) throw std::invalid_argument("solve_beltrami: max |mu| must be < 1");

  const int nx = mu.nx, ny = mu.ny;
  const std::size_t n = mu.values.size();
  BeltramiSolution sol;
  sol.psi = ComplexGridField(mu.origin, mu.spacing, nx, ny);
  sol.dpsi = sol.psi;
  sol.dbarpsi = sol.psi;
  QCSolveReport& rep = sol.report;
  rep.mu_sup = mu_sup;

  Convolver conv(nx, ny, mu.spacing);
  for (const cplx& s : conv.beurling()) rep.symbol_max = std::max(rep.symbol_max, std::abs(s));

  std::vector<cplx> w(n, 0.0), sw;
  if (mu_sup > 0.0) {
    double prev = std::numeric_limits<double>::infinity();
    int rising = 0;
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
      conv.apply(conv.beurling(), w, sw);
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const cplx wn = mu.values[i] * (1.0 + sw[i]);
        res = std::max(res, std::abs(wn - w[i]));
        w[i] = wn;
      }
      rep.iterations = it;
      rep.residual = res;
      if (!std::isfinite(res)) break;
      if (res < opts.tol) {
        converged = true;
        break;
      }
      rising = res > prev ? rising + 1 : 0;
      if (rising >= 5) break;
      prev = res;
    }
    if (!converged) {
      std::ostringstream os;
      os << "solve_beltrami: iteration stalled at residual " << rep.residual << " after " << rep.iterations
         << " iterations (max |mu| = " << mu_sup << ", grid " << nx << "x" << ny << ")";
      throw ConvergenceError(os.str());
    }
  }

  std::vector<cplx> cw;
  conv.apply(conv.beurling(), w, sw);
  conv.apply(conv.cauchy(), w, cw);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t i = mu.index(ix, iy);
      sol.psi.values[i] = mu.node(ix, iy) + cw[i];
      sol.dpsi.values[i] = 1.0 + sw[i];
      sol.dbarpsi.values[i] = w[i];
    }

  for (int iy = 1; iy + 1 < ny; ++iy)
    for (int ix = 1; ix + 1 < nx; ++ix) {
      const cplx m0 = mu.at(ix, iy);
      bool flat = true;
      for (int a = -1; a <= 1 && flat; ++a)
        for (int b = -1; b <= 1 && flat; ++b) flat = std::abs(mu.at(ix + a, iy + b) - m0) <= 1e-14;
      if (!flat) continue;
      cplx db;
      const cplx d = fd_d(sol.psi, ix, iy, &db);
      rep.fd_residual = std::max(rep.fd_residual, std::abs(db - m0 * d));
    }
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (ix != 0 && iy != 0 && ix != nx - 1 && iy != ny - 1) continue;
      const cplx z = mu.node(ix, iy);
      rep.sup_dev = std::max(rep.sup_dev, std::abs(sol.psi.at(ix, iy) / z - 1.0));
    }
  return sol;
}

PointPredicate exceptional_set_from_support(const ComplexGridField& mu) {
  const int nx = mu.nx, ny = mu.ny;
  const double inf = 1e12;  // exceeds any squared grid distance
  // Exact squared Euclidean distance transform (two 1-D lower-envelope passes).
  std::vector<double> g(mu.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = mu.values[i] != 0.0 ? 0.0 : inf;
  auto pass = [](const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    auto inter = [&](int q, int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
      double s = inter(q, v[k]);
      while (s <= z[k]) {
        --k;
        s = inter(q, v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    d.resize(n);
    for (int q = 0; q < n; ++q) {
      while (z[k + 1] < q) ++k;
      d[q] = double(q - v[k]) * (q - v[k]) + f[v[k]];
    }
  };
  std::vector<double> col, out;
  for (int ix = 0; ix < nx; ++ix) {
    col.resize(ny);
    for (int iy = 0; iy < ny; ++iy) col[iy] = g[mu.index(ix, iy)];
    pass(col, out);
    for (int iy = 0; iy < ny; ++iy) g[mu.index(ix, iy)] = out[iy];
  }
  for (int iy = 0; iy < ny; ++iy) {
    col.assign(g.begin() + static_cast<std::ptrdiff_t>(mu.index(0, iy)),
               g.begin() + static_cast<std::ptrdiff_t>(mu.index(0, iy) + nx));
    pass(col, out);
    for (int ix = 0; ix < nx; ++ix) g[mu.index(ix, iy)] = out[ix];
  }
  auto dist = std::make_shared<std::vector<double>>(std::move(g));
  const bool empty = std::none_of(mu.values.begin(), mu.values.end(), [](cplx v) { return v != 0.0; });
  const cplx origin = mu.origin;
  const double h = mu.spacing;
  return [dist, empty, origin, h, nx, ny](cplx z) {
    if (empty) return false;
    const double fx = (z.real() - origin.real()) / h, fy = (z.imag() - origin.imag()) / h;
    const int ix = std::clamp(static_cast<int>(std::lround(fx)), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>(std::lround(fy)), 0, ny - 1);
    const double outside = std::hypot(fx - ix, fy - iy) * h;
    const double d = std::sqrt((*dist)[static_cast<std::size_t>(iy) * nx + ix]) * h;
    const double beta = std::max(2.0 * h, std::sqrt(std::abs(z)));
    return d - outside <= beta;
  };
}

cplx eval_psi(const BeltramiSolution& sol, cplx zeta) {
  if (!sol.psi.inside(zeta)) return zeta;
  return sol.psi.interpolate(zeta);
}

cplx invert_psi(const BeltramiSolution& sol, cplx z) {
  cplx zeta = z;
  const double h = sol.psi.spacing;
  cplx r = z - sol.psi.interpolate(zeta);
  for (int it = 0; it < 200; ++it) {
    if (!sol.psi.inside(zeta)) return zeta;
    const cplx p = sol.dpsi.interpolate(zeta), q = sol.dbarpsi.interpolate(zeta);
    const double J = std::norm(p) - std::norm(q);
    cplx step = (std::conj(p) * r - q * std::conj(r)) / J;
    if (std::abs(step) <= 1e-13 * h) return zeta;
    // Backtrack: the bilinear interpolant has kinks at cell edges where full steps can cycle.
    for (int half = 0; half < 30; ++half) {
      const cplx next = zeta + step;
      const cplx rn = z - sol.psi.interpolate(next);
      if (std::abs(rn) < std::abs(r) || half == 29) {
        zeta = next;
        r = rn;
        break;
      }
      step *= 0.5;
    }
    if (std::abs(r) <= 1e-14 * (h + std::abs(z))) return zeta;
  }
  throw ConvergenceError("invert_psi: Newton iteration did not converge");
}

double min_jacobian_determinant(const ComplexGridField& psi) {
  double best = std::numeric_limits<double>::infinity();
  const double h = psi.spacing;
  for (int iy = 0; iy + 1 < psi.ny; ++iy)
    for (int ix = 0; ix + 1 < psi.nx; ++ix) {
      const cplx a = psi.at(ix, iy), b = psi.at(ix + 1, iy), c = psi.at(ix, iy + 1), d = psi.at(ix + 1, iy + 1);
      const cplx fx = 0.5 * ((b - a) + (d - c)) / h;
      const cplx fy = 0.5 * ((c - a) + (d - b)) / h;
      best = std::min(best, fx.real() * fy.imag() - fx.imag() * fy.real());
    }
  return best;
}

QCSolveReport conformal_at_infinity_report(const BeltramiSolution& sol, const ComplexGridField& mu,
                                           const PointPredicate& exceptional, const std::vector<double>& radii) {
  QCSolveReport rep = sol.report;
  const ComplexGridField& psi = sol.psi;
  rep.deriv_dev = 0.0;
  for (int iy = 2; iy + 2 < psi.ny; ++iy)
    for (int ix = 2; ix + 2 < psi.nx; ++ix) {
      const cplx z = psi.node(ix, iy);
      if (exceptional && exceptional(z)) continue;
      if (mu.at(ix, iy) != 0.0) continue;
      rep.deriv_dev = std::max(rep.deriv_dev, std::abs(fd_d(psi, ix, iy, nullptr) - 1.0));
    }
  std::vector<double> rs = radii;
  if (rs.empty()) {
    const double half = 0.5 * std::min(psi.nx - 1, psi.ny - 1) * psi.spacing;
    for (double f : {0.25, 0.5, 0.75, 0.95}) rs.push_back(f * half);
  }
  const cplx centre = psi.origin + 0.5 * psi.spacing * cplx(psi.nx - 1, psi.ny - 1);
  rep.frames.clear();
  for (double r : rs) {
    FrameReport fr;
    fr.radius = r;
    const int nt = 1440;
    int hits = 0;
    for (int j = 0; j < nt; ++j) {
      const cplx z = centre + std::polar(r, 2.0 * kPi * (j + 0.5) / nt);
      const cplx zeta = invert_psi(sol, z);
      if (z != 0.0) fr.sup_dev = std::max(fr.sup_dev, std::abs(eval_psi(sol, zeta) / zeta - 1.0));
      if (exceptional && exceptional(zeta)) ++hits;
    }
    fr.exceptional_measure = 2.0 * kPi * hits / nt;
    rep.frames.push_back(fr);
  }
  return rep;
}

}  // namespace qcs

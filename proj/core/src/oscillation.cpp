#include "qcs/oscillation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

constexpr double kPi = std::numbers::pi;

cplx central(const CFun& f, int order, cplx z, double h) {
  switch (order) {
    case 1: return (f(z + h) - f(z - h)) / (2.0 * h);
    case 2: return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
    case 3: return (f(z + 2.0 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2.0 * h)) / (2.0 * h * h * h);
    default: throw std::invalid_argument("fd_derivative: order must be 1, 2 or 3");
  }
}

}  // namespace

cplx fd_derivative(const CFun& f, int order, cplx z) {
  if (order == 0) return f(z);
  // Base step for first derivatives; higher orders widen it by 10 per order
  // to keep cancellation error near 1e-10, then two Richardson levels.
  const double h = (std::abs(z) * 2.5e-4 + 1e-6) * std::pow(10.0, order - 1);
  const cplx t0 = central(f, order, z, h), t1 = central(f, order, z, 0.5 * h), t2 = central(f, order, z, 0.25 * h);
  const cplx u0 = (4.0 * t1 - t0) / 3.0, u1 = (4.0 * t2 - t1) / 3.0;
  return (16.0 * u1 - u0) / 15.0;
}

bool HoloFun::analytic(int order) const noexcept {
  switch (order) {
    case 0: return static_cast<bool>(f);
    case 1: return static_cast<bool>(d1);
    case 2: return static_cast<bool>(d2);
    case 3: return static_cast<bool>(d3);
    default: return false;
  }
}

cplx HoloFun::derivative(int order, cplx z) const {
  const CFun* fns[4] = {&f, &d1, &d2, &d3};
  if (order < 0 || order > 3) throw std::invalid_argument("HoloFun::derivative: order must be 0..3");
  if (*fns[order]) return (*fns[order])(z);
  int base = order - 1;
  while (base > 0 && !*fns[base]) --base;
  return fd_derivative(*fns[base], order - base, z);
}

LogComplex HoloFun::log_value(cplx z) const {
  if (logf) return logf(z);
  return LogComplex::from_value(f(z));
}

cplx schwarzian(const HoloFun& F, cplx z) {
  const cplx f1 = F.derivative(1, z);
  if (std::abs(f1) <= 1e-14 * (1.0 + std::abs(F(z))))
    throw DomainError("schwarzian: F' vanishes (critical point)");
  const cplx r2 = F.derivative(2, z) / f1;
  return F.derivative(3, z) / f1 - 1.5 * r2 * r2;
}

cplx bank_laine_B(const HoloFun& E, cplx z) {
  const cplx e = E(z);
  if (e == 0.0 || std::abs(e) < 1e-300) throw DomainError("bank_laine_B: E vanishes");
  const cplx r1 = E.derivative(1, z) / e;
  return -2.0 * E.derivative(2, z) / e + r1 * r1 - 1.0 / (e * e);
}

HoloFun ratio_over_derivative(const HoloFun& F) {
  HoloFun E;
  E.f = [F](cplx z) { return F(z) / F.derivative(1, z); };
  E.d1 = [F](cplx z) {
    const cplx f1 = F.derivative(1, z);
    return 1.0 - F(z) * F.derivative(2, z) / (f1 * f1);
  };
  E.d2 = [F](cplx z) {
    const cplx f0 = F(z), f1 = F.derivative(1, z), f2 = F.derivative(2, z), f3 = F.derivative(3, z);
    return -(f1 * f2 + f0 * f3) / (f1 * f1) + 2.0 * f0 * f2 * f2 / (f1 * f1 * f1);
  };
  return E;
}

BankLaineReport check_bank_laine(const HoloFun& E, const std::vector<ZeroRecord>& zeros, bool special_mode,
                                 double tol) {
  BankLaineReport rep;
  for (const ZeroRecord& zr : zeros) {
    const cplx d = E.derivative(1, zr.location);
    auto fail = [&](const std::string& why) {
      rep.pass = false;
      rep.violations.push_back({zr.location, d, why});
    };
    if (zr.multiplicity != 1 || std::abs(d) <= tol) {
      fail("zero is not simple");
      continue;
    }
    const double dp = std::abs(d - 1.0), dm = std::abs(d + 1.0);
    rep.max_deviation = std::max(rep.max_deviation, std::min(dp, dm));
    if (dp <= tol) {
      ++rep.plus_count;
    } else if (dm <= tol) {
      ++rep.minus_count;
      if (special_mode) fail("E' = -1 at a zero; special mode requires +1 at every zero");
    } else {
      std::ostringstream os;
      os << "E' = " << d.real() << (d.imag() < 0 ? " - " : " + ") << std::abs(d.imag()) << "i is not +/-1";
      fail(os.str());
    }
  }
  return rep;
}

namespace {

struct Branch {
  cplx w1;
  bool ok;
};

// Root of 1/F'(z) closest to prev; ok is false when the choice is ambiguous.
Branch pick_root(const HoloFun& F, cplx z, cplx prev) {
  const cplx s = std::sqrt(1.0 / F.derivative(1, z));
  const cplx c = std::abs(s - prev) <= std::abs(s + prev) ? s : -s;
  const double turn = std::abs(std::arg(c / prev));
  return {c, turn <= 0.1 * kPi};
}

PathSample make_sample(const HoloFun& F, cplx z, cplx w1) {
  const cplx f0 = F(z), f1 = F.derivative(1, z), f2 = F.derivative(2, z);
  PathSample s;
  s.z = z;
  s.w1 = w1;
  s.w1p = -0.5 * (f2 / f1) * w1;
  s.w2 = f0 * w1;
  s.w2p = f1 * w1 + f0 * s.w1p;
  s.wronskian = s.w1 * s.w2p - s.w1p * s.w2;
  return s;
}

}  // namespace

PathSample RecoveredPair::at(cplx z) const {
  if (samples.empty()) throw std::logic_error("RecoveredPair::at: no samples");
  const PathSample* best = &samples.front();
  for (const PathSample& s : samples)
    if (std::abs(s.z - z) < std::abs(best->z - z)) best = &s;
  const Branch b = pick_root(F, z, best->w1);
  if (!b.ok) throw DomainError("RecoveredPair::at: point too far from the path for branch selection");
  return make_sample(F, z, b.w1);
}

RecoveredPair recover_solutions(const HoloFun& F, const Polyline& path, int steps_per_segment) {
  if (path.empty()) throw std::invalid_argument("recover_solutions: empty path");
  RecoveredPair out;
  out.F = F;
  cplx w1 = std::sqrt(1.0 / F.derivative(1, path.front()));
  out.samples.push_back(make_sample(F, path.front(), w1));
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const cplx a = path[seg], b = path[seg + 1];
    double t = 0.0;
    double dt = 1.0 / std::max(1, steps_per_segment);
    int refinements = 0;
    while (t < 1.0) {
      const double tn = std::min(1.0, t + dt);
      const cplx z = a + tn * (b - a);
      const Branch br = pick_root(F, z, w1);
      if (!br.ok) {
        dt *= 0.5;
        if (++refinements > 40) throw ConvergenceError("recover_solutions: branch tracking failed");
        continue;
      }
      w1 = br.w1;
      out.samples.push_back(make_sample(F, z, w1));
      t = tn;
    }
  }
  return out;
}

namespace {

using State = std::array<cplx, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const HoloFun& A;
  cplx a, dir;

  State rhs(double s, const State& y) const {
    const cplx z = a + s * dir;
    return {dir * y[1], -dir * A(z) * y[0]};
  }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State r = y;
  for (const auto& [c, k] : terms) {
    r[0] += h * c * (*k)[0];
    r[1] += h * c * (*k)[1];
  }
  return r;
}

// Integrates along the straight segment a -> b; appends accepted points.
State integrate_segment(const HoloFun& A, cplx a, cplx b, State y, double tol, SolutionTrace* trace) {
  const double L = std::abs(b - a);
  if (L == 0.0) return y;
  Stepper st{A, a, (b - a) / L};
  double s = 0.0;
  double h = std::min(L, 0.05);
  State k1 = st.rhs(0.0, y);
  while (s < L) {
    if (s + h > L) h = L - s;
    const State k2 = st.rhs(s + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State k3 = st.rhs(s + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = st.rhs(s + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = st.rhs(s + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        st.rhs(s + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = st.rhs(s + h, yn);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (err <= 1.0) {
      s += h;
      y = yn;
      k1 = k7;
      if (trace) {
        trace->points.push_back({a + s * st.dir, y[0], y[1]});
        ++trace->accepted;
      }
    } else if (trace) {
      ++trace->rejected;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (h < 1e-14 * std::max(1.0, L)) throw ConvergenceError("integrate_ode: step size underflow");
  }
  return y;
}

}  // namespace

SolutionTrace integrate_ode(const HoloFun& A, const Polyline& path, cplx w0, cplx w0p, double tol) {
  if (path.empty()) throw std::invalid_argument("integrate_ode: empty path");
  SolutionTrace tr;
  tr.points.push_back({path.front(), w0, w0p});
  State y{w0, w0p};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) y = integrate_segment(A, path[i], path[i + 1], y, tol, &tr);
  return tr;
}

std::vector<cplx> locate_trace_zeros(const HoloFun& A, const SolutionTrace& trace, double tol) {
  std::vector<cplx> zeros;
  const auto& P = trace.points;
  for (std::size_t i = 0; i + 1 < P.size(); ++i) {
    const cplx a = P[i].z, b = P[i + 1].z;
    const double len = std::abs(b - a);
    if (len == 0.0 || P[i].wp == 0.0) continue;
    const cplx cand = a - P[i].w / P[i].wp;
    const double t = std::real((cand - a) / (b - a));
    if (t < -0.01 || t > 1.01 || std::abs(cand - (a + t * (b - a))) > 0.5 * len) continue;
    // Newton with re-integration from the sample.
    cplx z = cand;
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
      const State y = integrate_segment(A, a, z, {P[i].w, P[i].wp}, std::min(tol, 1e-12), nullptr);
      if (y[1] == 0.0) break;
      const cplx step = y[0] / y[1];
      z -= step;
      if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    const bool dup = std::any_of(zeros.begin(), zeros.end(), [&](cplx q) { return std::abs(q - z) < 1e-8; });
    if (!dup) zeros.push_back(z);
  }
  std::sort(zeros.begin(), zeros.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return zeros;
}

namespace {

struct ArgTracker {
  const HoloFun& f;

  double arg_at(cplx z) const {
    LogComplex l;
    try {
      l = f.log_value(z);
    } catch (const DomainError&) {
      throw DomainError("winding_number: f vanishes on the contour");
    }
    if (!std::isfinite(l.log_mod))
      throw DomainError("winding_number: f vanishes on the contour");
    return l.arg;
  }

  double edge(cplx a, cplx b, double ta, double tb, int depth) const {
    const cplx m = 0.5 * (a + b);
    const double tm = arg_at(m);
    const double d1 = wrap_angle(tm - ta), d2 = wrap_angle(tb - tm), d = wrap_angle(tb - ta);
    // The local rate |f'/f| guards against whole turns hidden between samples.
    // |f'/f| from a short difference of log f, which stays finite where f over- or underflows.
    const double eps = 1e-6 * (1.0 + std::abs(m));
    const LogComplex l0 = f.log_value(m), l1 = f.log_value(m + eps * (b - a) / std::abs(b - a));
    const double rate = std::hypot(l1.log_mod - l0.log_mod, wrap_angle(l1.arg - l0.arg)) / eps * std::abs(b - a);
    if (std::abs(d1) < 0.25 * kPi && std::abs(d2) < 0.25 * kPi && std::abs(d1 + d2 - d) < 1e-9 &&
        !(rate > 0.5 * kPi))
      return d1 + d2;
    if (depth <= 0 || std::abs(b - a) < 1e-13 * (1.0 + std::abs(a)))
      throw DomainError("winding_number: argument not resolved (zero near the contour)");
    return edge(a, m, ta, tm, depth - 1) + edge(m, b, tm, tb, depth - 1);
  }
};

}  // namespace

int winding_number(const HoloFun& f, const Rect& r) {
  ArgTracker tr{f};
  const cplx c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
  double t[4];
  for (int i = 0; i < 4; ++i) t[i] = tr.arg_at(c[i]);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    // Split long edges first so that the recursion starts from a fine partition.
    const int pieces = 16;
    cplx a = c[i];
    double ta = t[i];
    for (int p = 1; p <= pieces; ++p) {
      const cplx b = p == pieces ? c[(i + 1) % 4] : c[i] + (c[(i + 1) % 4] - c[i]) * (double(p) / pieces);
      const double tb = p == pieces ? t[(i + 1) % 4] : tr.arg_at(b);
      total += tr.edge(a, b, ta, tb, 50);
      a = b;
      ta = tb;
    }
  }
  const double wn = total / (2.0 * kPi);
  const double rounded = std::round(wn);
  if (std::abs(wn - rounded) > 1e-6) throw DomainError("winding_number: non-integer winding");
  return static_cast<int>(rounded);
}

namespace {

struct Counter {
  const HoloFun& f;
  double scale;
  std::vector<ZeroRecord> found;

  cplx newton(cplx z, int mult, double size, bool* ok) const {
    *ok = false;
    for (int it = 0; it < 100; ++it) {
      cplx v, d;
      try {
        v = f(z);
        d = f.derivative(1, z);
      } catch (const std::exception&) {
        return z;  // wandered where f cannot be evaluated; the caller subdivides
      }
      if (v == 0.0) {
        *ok = true;
        return z;
      }
      if (d == 0.0) return z;
      cplx step = static_cast<double>(mult) * v / d;
      if (std::abs(step) > size) step *= size / std::abs(step);
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return z;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
        *ok = true;
        return z;
      }
    }
    // Linear convergence at multiple zeros stalls near 1e-10.
    *ok = true;
    return z;
  }

  void record(cplx z, int mult) {
    found.push_back({z, mult, f.derivative(1, z)});
  }

  void split(const Rect& r, int count, int depth) {
    if (count == 0) return;
    const double size = std::max(r.width(), r.height());
    const cplx centre(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
    if (count == 1) {
      bool ok = false;
      const cplx z = newton(centre, 1, size, &ok);
      const double slack = 1e-9 * scale;
      if (ok && z.real() >= r.x0 - slack && z.real() <= r.x1 + slack && z.imag() >= r.y0 - slack &&
          z.imag() <= r.y1 + slack) {
        record(z, 1);
        return;
      }
    } else if (size < 1e-7 * scale || depth > 60) {
      bool ok = false;
      const cplx z = newton(centre, count, size, &ok);
      record(ok ? z : centre, count);
      return;
    }
    if (depth > 80) throw ConvergenceError("count_zeros: subdivision did not isolate zeros");
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double shift = attempt == 0 ? 0.0 : 0.0123 * attempt;
      const double xm = r.x0 + (0.5 + shift) * r.width();
      const double ym = r.y0 + (0.5 - 0.7 * shift) * r.height();
      const Rect q[4] = {{r.x0, xm, r.y0, ym}, {xm, r.x1, r.y0, ym}, {r.x0, xm, ym, r.y1}, {xm, r.x1, ym, r.y1}};
      int n[4];
      try {
        for (int i = 0; i < 4; ++i) n[i] = winding_number(f, q[i]);
      } catch (const DomainError&) {
        continue;
      }
      if (n[0] + n[1] + n[2] + n[3] != count) continue;
      for (int i = 0; i < 4; ++i) split(q[i], n[i], depth + 1);
      return;
    }
    throw ConvergenceError("count_zeros: could not place split lines away from zeros");
  }
};

}  // namespace

ZeroCount count_zeros(const HoloFun& f, const Rect& rect, int max_nudges) {
  ZeroCount out;
  Rect r = rect;
  const double scale = std::max({1.0, std::abs(rect.x0), std::abs(rect.x1), std::abs(rect.y0), std::abs(rect.y1)});
  for (int attempt = 0;; ++attempt) {
    try {
      out.count = winding_number(f, r);
      break;
    } catch (const DomainError&) {
      if (attempt >= max_nudges) throw DomainError("count_zeros: zero on the boundary after repeated nudges");
      const double d = 1e-6 * scale * (attempt + 1) * 1.618;
      r = {r.x0 - d, r.x1 + 0.7 * d, r.y0 - 0.9 * d, r.y1 + 1.1 * d};
      ++out.nudges;
    }
  }
  out.rect_used = r;
  if (out.count < 0) throw DomainError("count_zeros: negative winding (f has poles inside)");
  Counter c{f, scale, {}};
  c.split(r, out.count, 0);
  out.zeros = std::move(c.found);
  std::sort(out.zeros.begin(), out.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.location.imag() != b.location.imag() ? a.location.imag() < b.location.imag()
                                                  : a.location.real() < b.location.real();
  });
  return out;
}

HoloFun g_holofun(BlockIndex m) {
  HoloFun g;
  const double lf = std::lgamma(2.0 * m.value() + 1.0);
  const double p = 2.0 * m.value() + 1.0;
  g.logf = [m](cplx z) { return log_g(m, z); };
  g.f = [m](cplx z) {
    try {
      return log_g(m, z).value();
    } catch (const DomainError&) {
      return cplx(0.0, 0.0);
    }
  };
  g.d1 = [lf, p](cplx z) { return std::exp(std::exp(z) + p * z - lf); };
  g.d2 = [lf, p](cplx z) { return std::exp(std::exp(z) + p * z - lf) * (std::exp(z) + p); };
  g.d3 = [lf, p](cplx z) {
    const cplx e = std::exp(z), s = e + p;
    return std::exp(e + p * z - lf) * (s * s + e);
  };
  return g;
}

}  // namespace qcs

#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qcs/errors.hpp"
#include "qcs/log_complex.hpp"
#include "qcs/special.hpp"

namespace qcs {

using CFun = std::function<cplx(cplx)>;

// Holomorphic function with optional analytic derivatives. Missing
// derivatives fall back to Richardson-extrapolated central differences of the
// highest analytic one available.
struct HoloFun {
  CFun f;
  CFun d1, d2, d3;
  // Optional overflow-safe evaluator; used by argument tracking when set.
  std::function<LogComplex(cplx)> logf;

  cplx operator()(cplx z) const { return f(z); }
  cplx derivative(int order, cplx z) const;
  bool analytic(int order) const noexcept;
  LogComplex log_value(cplx z) const;
};

// Richardson-extrapolated central difference of order 1..3 with step
// h = |z| * 2.5e-4 + 1e-6 for order 1, times 10 per extra order.
cplx fd_derivative(const CFun& f, int order, cplx z);

struct ZeroRecord {
  cplx location;
  int multiplicity = 1;
  cplx derivative_at_zero;
};

// Throws DomainError when |F'(z)| is below tolerance.
cplx schwarzian(const HoloFun& F, cplx z);
// Throws DomainError at zeros of E.
cplx bank_laine_B(const HoloFun& E, cplx z);

// E = F/F' with E' and E'' from derivatives of F.
HoloFun ratio_over_derivative(const HoloFun& F);

struct BankLaineViolation {
  cplx location;
  cplx derivative;
  std::string reason;
};

struct BankLaineReport {
  bool pass = true;
  int plus_count = 0;
  int minus_count = 0;
  double max_deviation = 0.0;  // max |E'(zero) -/+ 1| over simple zeros
  std::vector<BankLaineViolation> violations;
};

// Each zero must be simple with E' = +1 or -1 within tol. In special mode
// every zero must carry E' = +1 (a zero-free solution exists).
BankLaineReport check_bank_laine(const HoloFun& E, const std::vector<ZeroRecord>& zeros, bool special_mode,
                                 double tol = 1e-6);

using Polyline = std::vector<cplx>;

struct PathSample {
  cplx z;
  cplx w1, w1p, w2, w2p;
  cplx wronskian;
};

// w1^2 = 1/F', w2 = F w1, continued along a path from a fixed branch.
struct RecoveredPair {
  HoloFun F;
  std::vector<PathSample> samples;
  // Values at z using the branch of the nearest sample; z must be close to the path.
  PathSample at(cplx z) const;
};

RecoveredPair recover_solutions(const HoloFun& F, const Polyline& path, int steps_per_segment = 64);

struct TracePoint {
  cplx z, w, wp;
};

struct SolutionTrace {
  std::vector<TracePoint> points;
  int accepted = 0;
  int rejected = 0;
};

// Dormand-Prince 5(4) for w'' + A w = 0 along a polyline, mixed abs/rel tol.
SolutionTrace integrate_ode(const HoloFun& A, const Polyline& path, cplx w0, cplx w0p, double tol = 1e-10);

// Zeros of the traced solution near the path, refined by Newton with local
// re-integration.
std::vector<cplx> locate_trace_zeros(const HoloFun& A, const SolutionTrace& trace, double tol = 1e-10);

// Winding number of f around rect. Throws DomainError if f vanishes on or
// too close to the boundary.
int winding_number(const HoloFun& f, const Rect& rect);

struct ZeroCount {
  int count = 0;
  std::vector<ZeroRecord> zeros;
  Rect rect_used;
  int nudges = 0;
};

ZeroCount count_zeros(const HoloFun& f, const Rect& rect, int max_nudges = 5);

// g_m as a HoloFun with analytic derivatives and log evaluator.
HoloFun g_holofun(BlockIndex m);

}  // namespace qcs

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "qcs/beltrami.hpp"
#include "qcs/gluing.hpp"
#include "qcs/nevanlinna.hpp"
#include "qcs/special.hpp"
#include "qcs/spiral.hpp"
#include "qcs/surgery.hpp"

namespace {

using qcs::BlockIndex;
using cplx = std::complex<double>;

void BM_log_g(benchmark::State& state) {
  const BlockIndex m(static_cast<int>(state.range(0)));
  double x = -30.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcs::log_g(m, cplx(x, 1.3)));
    x = x > 30.0 ? -30.0 : x + 0.37;
  }
}
BENCHMARK(BM_log_g)->Arg(0)->Arg(1)->Arg(4);

void BM_phi(benchmark::State& state) {
  const qcs::GlueParams gp = qcs::glue_constants(BlockIndex(0), BlockIndex(1));
  double x = -40.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcs::phi(gp, x));
    x = x > 40.0 ? -40.0 : x + 0.53;
  }
}
BENCHMARK(BM_phi);

void BM_eval_U(benchmark::State& state) {
  const qcs::GlueParams gp = qcs::glue_constants(BlockIndex(0), BlockIndex(1));
  const qcs::SpiralParams sp = qcs::make_spiral(gp.k);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcs::eval_U(gp, sp, std::polar(20.0, t)));
    t += 0.071;
  }
}
BENCHMARK(BM_eval_U);

void BM_proximity_exp(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qcs::proximity_m([](cplx z) { return z.real(); }, r));
}
BENCHMARK(BM_proximity_exp)->Arg(10)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_composed_profile(benchmark::State& state) {
  const qcs::GlueParams gp = qcs::glue_constants(BlockIndex(0), BlockIndex(1));
  const qcs::SpiralParams sp = qcs::make_spiral(gp.k);
  const std::vector<double> radii{1e2, 1e4, 1e6};
  for (auto _ : state) benchmark::DoNotOptimize(qcs::composed_logderiv_profile(gp, sp, radii));
}
BENCHMARK(BM_composed_profile)->Unit(benchmark::kMillisecond);

void BM_solve_beltrami(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qcs::ComplexGridField mu = qcs::make_cell_centred_grid(-2.0, 2.0, -2.0, 2.0, n, n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (std::abs(mu.node(ix, iy)) < 1.0) mu.at(ix, iy) = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(qcs::solve_beltrami(mu));
}
BENCHMARK(BM_solve_beltrami)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

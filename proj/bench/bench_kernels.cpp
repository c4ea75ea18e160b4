// Serial reference versus OpenMP kernels.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "mobilium/baker_akhiezer.hpp"
#include "mobilium/mobile_solver.hpp"
#include "mobilium/oracle.hpp"
#include "mobilium/spectral_curve.hpp"

using namespace mobilium;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_BandMultiply(benchmark::State& st) {
    auto sol = solve(CouplingSpec::all_symbolic(3, 3), 4, 8);
    for (auto _ : st) benchmark::DoNotOptimize(multiply(sol.P, sol.Q, exec_of(st)));
}
BENCHMARK(BM_BandMultiply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& st) {
    SolveOptions opts;
    opts.exec = exec_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(solve(CouplingSpec::all_symbolic(4, 2), 6, 10, opts));
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& st) {
    OracleRequest req;
    req.p = 3;
    req.q = 3;
    req.max_weighted = 3;
    for (auto _ : st) benchmark::DoNotOptimize(enumerate(req, exec_of(st)));
}
BENCHMARK(BM_Oracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Baker-Akhiezer construction parallelizes over m; Arg(0) pins one thread
void BM_BuildPsiPhi(benchmark::State& st) {
    auto spec = CouplingSpec::make(4, 2);
    apply_couplings(spec, "g2=1/10,gt2=1/10,gt4=1/20");
    auto c = refine_numeric<Quad>(spec);
    curve_polynomial(c);
    auto d = double_points(c);
    int threads = omp_get_max_threads();
    omp_set_num_threads(st.range(0) ? threads : 1);
    for (auto _ : st) benchmark::DoNotOptimize(build_psi_phi(d, 20));
    omp_set_num_threads(threads);
}
BENCHMARK(BM_BuildPsiPhi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <dualgal/assembly.hpp>
#include <dualgal/problems.hpp>
#include <dualgal/solver.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace dualgal;

namespace {

ProblemSpec transient_spec() {
    return ProblemSpec::transient_cd(0.01, 0.1, [](double x) { return std::sin(2 * std::numbers::pi * x); });
}

}  // namespace

static void BM_AssembleSteady(benchmark::State& state) {
    const auto spec = ProblemSpec::steady_cd(10.0, 1.0);
    const int n = static_cast<int>(state.range(0));
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 4, n, {}}, {BasisFamily::bspline, 3, n, {}});
    for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, ans));
}
BENCHMARK(BM_AssembleSteady)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

// Second argument is the worker count; results are identical across it.
static void BM_AssembleTransient(benchmark::State& state) {
    const auto spec = transient_spec();
    const int n = static_cast<int>(state.range(0));
    const auto ans = build_dual_ansatz(spec, {BasisFamily::bspline, 4, n, {}}, {BasisFamily::bspline, 3, n, {}});
    const AssemblyOptions opts{static_cast<int>(state.range(1)), false};
    for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, ans, opts));
}
BENCHMARK(BM_AssembleTransient)->Args({4, 1})->Args({8, 1})->Args({8, 2})->Unit(benchmark::kMillisecond);

static void BM_SolveDefinite(benchmark::State& state) {
    const auto spec = ProblemSpec::steady_cd(10.0, 1.0);
    const int n = static_cast<int>(state.range(0));
    const auto sys = assemble(spec, build_dual_ansatz(spec, {BasisFamily::bspline, 4, n, {}},
                                                      {BasisFamily::bspline, 3, n, {}}));
    for (auto _ : state) benchmark::DoNotOptimize(solve_symmetric_consistent(sys));
}
BENCHMARK(BM_SolveDefinite)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_SolveRePUFrame(benchmark::State& state) {
    const auto spec = ProblemSpec::steady_cd(10.0, 1.0);
    const int n = static_cast<int>(state.range(0));
    const auto sys = assemble(spec, build_dual_ansatz(spec, {BasisFamily::repu, 3, n, {}}, {BasisFamily::repu, 2, n, {}}),
                              {1, true});
    for (auto _ : state) benchmark::DoNotOptimize(solve_symmetric_consistent(sys));
}
BENCHMARK(BM_SolveRePUFrame)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_TransientSpaceTimeSolve(benchmark::State& state) {
    const auto spec = transient_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_problem(spec, {BasisFamily::bspline, 10, 1, {}}, {BasisFamily::bspline, 9, 1, {}}));
    }
}
BENCHMARK(BM_TransientSpaceTimeSolve)->Unit(benchmark::kMillisecond);

static void BM_ConvergenceStudy(benchmark::State& state) {
    const auto spec = ProblemSpec::steady_cd(50.0, 1.0);
    const std::vector<int> ns{4, 8, 16, 32, 64};
    StudyOptions opts;
    opts.workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(convergence_study(spec, BasisFamily::bspline, 3, 4, ns, opts));
}
BENCHMARK(BM_ConvergenceStudy)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

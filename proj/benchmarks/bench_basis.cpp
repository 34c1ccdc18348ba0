#include <dualgal/basis.hpp>
#include <dualgal/quadrature.hpp>

#include <benchmark/benchmark.h>

using namespace dualgal;

static void BM_BSplineEvaluate(benchmark::State& state) {
    const auto basis = BasisSet1D::bspline(static_cast<int>(state.range(0)), 64);
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(basis.evaluate(x));
        x += 0.618033988749895;
        if (x >= 1.0) x -= 1.0;
    }
}
BENCHMARK(BM_BSplineEvaluate)->Arg(1)->Arg(3)->Arg(6)->Arg(10);

static void BM_RePUEvaluate(benchmark::State& state) {
    const auto basis = BasisSet1D::repu_mu(2, static_cast<int>(state.range(0)));
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(basis.evaluate(x));
        x += 0.618033988749895;
        if (x >= 1.0) x -= 1.0;
    }
}
BENCHMARK(BM_RePUEvaluate)->Arg(16)->Arg(64);

static void BM_GaussLegendreRule(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre_rule(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GaussLegendreRule)->Arg(4)->Arg(16)->Arg(32);

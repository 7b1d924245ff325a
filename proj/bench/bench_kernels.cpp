// OpenMP kernels against their serial references.
//
//   REACHUNDER_THREADS=4 ./bench_kernels --benchmark_filter=Reach

#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "reachunder/parallel.hpp"
#include "reachunder/reach.hpp"
#include "reachunder/validate.hpp"

using namespace reachunder;

namespace {

struct Fixture {
    std::shared_ptr<const SystemSpec> sys;
    TransitionOracle orc;
};

Fixture fixture(const char* name)
{
    auto sys = std::make_shared<const SystemSpec>(builtin_system(name));
    return {sys, TransitionOracle::best_for(sys)};
}

void BM_ReachParallel(benchmark::State& state)
{
    const Fixture f = fixture("dcdc");
    for (auto _ : state) {
        benchmark::DoNotOptimize(reach_sets(*f.sys, f.orc, static_cast<int>(state.range(0))));
    }
}

void BM_ReachSerial(benchmark::State& state)
{
    const Fixture f = fixture("dcdc");
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            reach_sets_serial(*f.sys, f.orc, static_cast<int>(state.range(0))));
    }
}

void BM_CertifyParallel(benchmark::State& state)
{
    const Fixture f = fixture("dcdc");
    const ReachResult r = reach_sets(*f.sys, f.orc, 10);
    CertifyOptions opts;
    opts.trials = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify_under_approximation(*f.sys, f.orc, r, opts));
    }
}

void BM_CertifySerial(benchmark::State& state)
{
    const Fixture f = fixture("dcdc");
    const ReachResult r = reach_sets(*f.sys, f.orc, 10);
    CertifyOptions opts;
    opts.trials = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify_under_approximation_serial(*f.sys, f.orc, r, opts));
    }
}

void BM_HausdorffConvexParallel(benchmark::State& state)
{
    const Fixture f = fixture("academic");
    const Zonotope a = reach_sets(*f.sys, f.orc, 40).lambdas.back();
    const Zonotope b = reach_sets(*f.sys, f.orc, 200).lambdas.back();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hausdorff_convex(a, b, static_cast<int>(state.range(0))));
    }
}

void BM_HausdorffConvexSerial(benchmark::State& state)
{
    const Fixture f = fixture("academic");
    const Zonotope a = reach_sets(*f.sys, f.orc, 40).lambdas.back();
    const Zonotope b = reach_sets(*f.sys, f.orc, 200).lambdas.back();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hausdorff_convex_serial(a, b, static_cast<int>(state.range(0))));
    }
}

PointCloud cloud(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<> u(-1.0, 1.0);
    PointCloud c(count);
    for (auto& p : c) {
        p = {u(rng), u(rng)};
    }
    return c;
}

void BM_HausdorffPointsGrid(benchmark::State& state)
{
    const PointCloud a = cloud(static_cast<std::size_t>(state.range(0)), 1);
    const PointCloud b = cloud(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hausdorff_points(a, b));
    }
}

void BM_HausdorffPointsBruteForce(benchmark::State& state)
{
    const PointCloud a = cloud(static_cast<std::size_t>(state.range(0)), 1);
    const PointCloud b = cloud(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hausdorff_points_bruteforce(a, b));
    }
}

}  // namespace

BENCHMARK(BM_ReachParallel)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReachSerial)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyParallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifySerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HausdorffConvexParallel)->Arg(720)->Arg(7200);
BENCHMARK(BM_HausdorffConvexSerial)->Arg(720)->Arg(7200);
BENCHMARK(BM_HausdorffPointsGrid)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HausdorffPointsBruteForce)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
        return 1;
    }
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

// OpenMP kernels against their serial references.
#include "jdpp/kernels.hpp"
#include "jdpp/opalg.hpp"
#include "jdpp/sampling.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace jdpp;

namespace {

std::shared_ptr<const Grid> grid(int per_side) {
    GridSpec s;
    s.nodes_per_side = per_side;
    s.panels = per_side / 10;
    s.delta = 0.05;
    s.outer = 30.0;
    return std::make_shared<const Grid>(build_grid(s));
}

const KernelFn& kernel() {
    static const KernelFn k = whittaker_kernel(KernelParams::make({0.3, 1.0}, {0.3, -1.0}));
    return k;
}

const OperatorMatrix& k_matrix(int per_side) {
    static std::map<int, OperatorMatrix> cache;
    auto it = cache.find(per_side);
    if (it == cache.end()) {
        const KernelParams p = KernelParams::make({0.3, 1.0}, {0.3, -1.0});
        it = cache.emplace(per_side, k_from_l(discretize(l_kernel(whittaker_a(p)), grid(per_side)))).first;
    }
    return it->second;
}

void BM_discretize(benchmark::State& st) {
    const auto g = grid(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(discretize(kernel(), g));
}

void BM_discretize_serial(benchmark::State& st) {
    const auto g = grid(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(discretize_serial(kernel(), g));
}

void BM_sample(benchmark::State& st) {
    const OperatorMatrix& K = k_matrix(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(sample_dual_k(K, 2000, 1));
}

void BM_sample_serial(benchmark::State& st) {
    const OperatorMatrix& K = k_matrix(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(sample_dual_k_serial(K, 2000, 1));
}

}  // namespace

BENCHMARK(BM_discretize)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_discretize_serial)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

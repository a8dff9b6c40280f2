#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wach/kernels.hpp"
#include "wach/linalg.hpp"

using namespace wach;

namespace {

std::vector<u128> random_vec(std::size_t n, const ZpRing& ring, u64 seed) {
    std::mt19937_64 rng(seed);
    std::vector<u128> v(n);
    for (auto& x : v) x = ((u128)rng() << 64 | rng()) % ring.modulus;
    return v;
}

void conv_bench(benchmark::State& state, kernels::Exec exec) {
    std::size_t n = state.range(0);
    ZpRing ring = ZpRing::make(7, 10);
    auto a = random_vec(n, ring, 1), b = random_vec(n, ring, 2);
    std::vector<u128> out(n);
    for (auto _ : state) {
        kernels::conv(a.data(), n, b.data(), n, out.data(), n, ring, exec);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void mat_bench(benchmark::State& state, kernels::Exec exec) {
    unsigned dim = 4, mlen = state.range(0);
    ZpRing ring = ZpRing::make(5, 8);
    SeriesMatrix x = SeriesMatrix::zero(ring, mlen, dim);
    SeriesMatrix y = SeriesMatrix::zero(ring, mlen, dim);
    for (unsigned i = 0; i < dim; ++i)
        for (unsigned j = 0; j < dim; ++j) {
            x.at(i, j) = Series::from_coeffs(ring, mlen, random_vec(mlen, ring, i * dim + j));
            y.at(i, j) =
                Series::from_coeffs(ring, mlen, random_vec(mlen, ring, 100 + i * dim + j));
        }
    kernels::Exec saved = kernels::default_exec();
    kernels::set_default_exec(exec);
    for (auto _ : state) {
        SeriesMatrix z = mat_mul(x, y);
        benchmark::DoNotOptimize(z.e.data());
    }
    kernels::set_default_exec(saved);
}

}  // namespace

BENCHMARK_CAPTURE(conv_bench, serial, kernels::Exec::Serial)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(conv_bench, parallel, kernels::Exec::Parallel)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(mat_bench, serial, kernels::Exec::Serial)->Arg(128)->Arg(512);
BENCHMARK_CAPTURE(mat_bench, parallel, kernels::Exec::Parallel)->Arg(128)->Arg(512);

BENCHMARK_MAIN();

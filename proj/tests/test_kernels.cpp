#include <doctest.h>

#include <random>
#include <vector>

#include "wach/kernels.hpp"

using namespace wach;

namespace {

std::vector<u128> random_vec(std::size_t n, const ZpRing& ring, std::mt19937_64& rng) {
    std::vector<u128> v(n);
    for (auto& x : v) x = ((u128)rng() << 64 | rng()) % ring.modulus;
    return v;
}

}  // namespace

TEST_CASE("convolution matches a direct double loop") {
    ZpRing ring = ZpRing::make(7, 5);
    std::mt19937_64 rng(42);
    for (int round = 0; round < 10; ++round) {
        std::size_t na = 1 + rng() % 40, nb = 1 + rng() % 40, nout = 1 + rng() % 60;
        auto a = random_vec(na, ring, rng), b = random_vec(nb, ring, rng);
        std::vector<u128> want(nout, 0);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nb; ++j)
                if (i + j < nout) want[i + j] = ring.add(want[i + j], ring.mul(a[i], b[j]));
        std::vector<u128> got(nout, 0xdead);
        kernels::ref::conv(a.data(), na, b.data(), nb, got.data(), nout, ring);
        CHECK(got == want);
    }
}

TEST_CASE("parallel convolution is bit-identical to the serial reference") {
    ZpRing ring = ZpRing::make(5, 10);
    std::mt19937_64 rng(7);
    for (std::size_t n : {1, 17, 256, 1000}) {
        auto a = random_vec(n, ring, rng), b = random_vec(n, ring, rng);
        std::vector<u128> serial(2 * n - 1, 0), parallel(2 * n - 1, 0);
        kernels::conv(a.data(), n, b.data(), n, serial.data(), serial.size(), ring,
                      kernels::Exec::Serial);
        kernels::conv(a.data(), n, b.data(), n, parallel.data(), parallel.size(), ring,
                      kernels::Exec::Parallel);
        CHECK(serial == parallel);
    }
}

TEST_CASE("accumulating convolution adds onto existing contents") {
    ZpRing ring = ZpRing::make(3, 4);
    std::vector<u128> a{1, 2}, b{3, 4};
    std::vector<u128> out{10, 10, 10};
    kernels::conv_acc(a.data(), 2, b.data(), 2, out.data(), 3, ring, kernels::Exec::Serial);
    CHECK(out[0] == (10 + 3) % 81);
    CHECK(out[1] == (10 + 4 + 6) % 81);
    CHECK(out[2] == (10 + 8) % 81);
}

TEST_CASE("exec policy plumbing") {
    auto saved = kernels::default_exec();
    kernels::set_default_exec(kernels::Exec::Serial);
    CHECK(kernels::default_exec() == kernels::Exec::Serial);
    kernels::set_default_exec(saved);
    std::size_t t = kernels::parallel_threshold();
    kernels::set_parallel_threshold(123);
    CHECK(kernels::parallel_threshold() == 123);
    kernels::set_parallel_threshold(t);
}

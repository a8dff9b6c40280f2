#include "wach/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wach::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::Auto};
std::atomic<std::size_t> g_threshold{1u << 15};

inline u128 mulmod(const ZpRing& ring, u128 a, u128 b) { return ring.mul(a, b); }

inline u128 row_sum(const u128* a, std::size_t na, const u128* b, std::size_t nb,
                    std::size_t k, const ZpRing& ring) {
    std::size_t lo = k >= nb ? k - nb + 1 : 0;
    std::size_t hi = k < na ? k : na - 1;
    u128 acc = 0;
    if (ring.modulus <= UINT64_MAX) {
        const u128 m = ring.modulus;
        for (std::size_t i = lo; i <= hi; ++i) {
            acc += (a[i] * b[k - i]) % m;
            if (acc >= m) acc -= m;
        }
    } else {
        for (std::size_t i = lo; i <= hi; ++i) acc = ring.add(acc, mulmod(ring, a[i], b[k - i]));
    }
    return acc;
}

bool use_parallel(std::size_t na, std::size_t nb, Exec exec) {
    Exec mode = exec == Exec::Auto ? g_exec.load() : exec;
    if (mode == Exec::Serial) return false;
#ifdef _OPENMP
    if (mode == Exec::Parallel) return true;
    return na * nb >= g_threshold.load() && omp_get_max_threads() > 1;
#else
    return false;
#endif
}
}  // namespace

void set_default_exec(Exec e) { g_exec.store(e); }
Exec default_exec() { return g_exec.load(); }
void set_parallel_threshold(std::size_t work) { g_threshold.store(work); }
std::size_t parallel_threshold() { return g_threshold.load(); }

bool have_openmp() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

namespace ref {

void conv(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
          std::size_t nout, const ZpRing& ring) {
    for (std::size_t k = 0; k < nout; ++k) out[k] = row_sum(a, na, b, nb, k, ring);
}

void conv_acc(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
              std::size_t nout, const ZpRing& ring) {
    for (std::size_t k = 0; k < nout; ++k) out[k] = ring.add(out[k], row_sum(a, na, b, nb, k, ring));
}

}  // namespace ref

void conv(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
          std::size_t nout, const ZpRing& ring, Exec exec) {
    if (!use_parallel(na, nb, exec)) {
        ref::conv(a, na, b, nb, out, nout, ring);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < (long long)nout; ++k)
        out[k] = row_sum(a, na, b, nb, (std::size_t)k, ring);
#endif
}

void conv_acc(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
              std::size_t nout, const ZpRing& ring, Exec exec) {
    if (!use_parallel(na, nb, exec)) {
        ref::conv_acc(a, na, b, nb, out, nout, ring);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < (long long)nout; ++k)
        out[k] = ring.add(out[k], row_sum(a, na, b, nb, (std::size_t)k, ring));
#endif
}

}  // namespace wach::kernels

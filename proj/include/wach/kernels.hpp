#pragma once

#include <cstddef>

#include "wach/zp.hpp"

namespace wach::kernels {

enum class Exec { Auto, Serial, Parallel };

// Process-wide execution policy for Auto dispatch. Parallel kernels produce
// bit-identical results to the serial reference for any thread count: each
// output coefficient is owned by one thread and accumulated in a fixed order.
void set_default_exec(Exec e);
Exec default_exec();
void set_parallel_threshold(std::size_t work);
std::size_t parallel_threshold();
bool have_openmp();

// out[k] = sum_{i+j=k} a[i]*b[j] mod ring, for k < nout.
void conv(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
          std::size_t nout, const ZpRing& ring, Exec exec = Exec::Auto);

// Accumulating variant: out[k] += conv result.
void conv_acc(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
              std::size_t nout, const ZpRing& ring, Exec exec = Exec::Auto);

// Serial reference implementations, kept independent of the dispatcher so the
// parallel path can be validated against them.
namespace ref {
void conv(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
          std::size_t nout, const ZpRing& ring);
void conv_acc(const u128* a, std::size_t na, const u128* b, std::size_t nb, u128* out,
              std::size_t nout, const ZpRing& ring);
}  // namespace ref

}  // namespace wach::kernels

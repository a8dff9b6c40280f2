#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wach/series.hpp"

namespace wach {

inline constexpr unsigned kMaxDim = 8;

// Constant matrix over Z/p^N, row-major.
struct ConstMatrix {
    ZpRing ring{};
    unsigned dim = 0;
    std::vector<u128> a;

    static ConstMatrix identity(const ZpRing& r, unsigned dim);
    static ConstMatrix from_rows(const ZpRing& r, const std::vector<std::vector<u128>>& rows);
    u128 at(unsigned i, unsigned j) const { return a[i * dim + j]; }
    u128& at(unsigned i, unsigned j) { return a[i * dim + j]; }
    bool operator==(const ConstMatrix&) const = default;
};

ConstMatrix const_mul(const ConstMatrix& x, const ConstMatrix& y);
u128 const_det(const ConstMatrix& x);
// Gauss-Jordan with unit pivots; requires det a unit mod p.
ConstMatrix const_inv(const ConstMatrix& x);

// Square matrix of series sharing one (p, N, M) frame, row-major.
struct SeriesMatrix {
    unsigned dim = 0;
    std::vector<Series> e;

    static SeriesMatrix zero(const ZpRing& r, unsigned mlen, unsigned dim);
    static SeriesMatrix identity(const ZpRing& r, unsigned mlen, unsigned dim);
    static SeriesMatrix from_const(const ConstMatrix& c, unsigned mlen);
    const Series& at(unsigned i, unsigned j) const { return e[i * dim + j]; }
    Series& at(unsigned i, unsigned j) { return e[i * dim + j]; }
    const ZpRing& ring() const { return e.front().ring; }
    unsigned mlen() const { return e.front().mlen; }
    bool operator==(const SeriesMatrix& o) const;
};

SeriesMatrix mat_add(const SeriesMatrix& x, const SeriesMatrix& y);
SeriesMatrix mat_sub(const SeriesMatrix& x, const SeriesMatrix& y);
SeriesMatrix mat_mul(const SeriesMatrix& x, const SeriesMatrix& y);
SeriesMatrix mat_mul(const ConstMatrix& x, const SeriesMatrix& y);
SeriesMatrix mat_mul(const SeriesMatrix& x, const ConstMatrix& y);

// Entrywise ring-endomorphism application.
SeriesMatrix mat_apply(const Substitution& sub, const SeriesMatrix& x);

struct DetAdj {
    Series det;
    SeriesMatrix adj;  // X * adj = adj * X = det * Id
};
// Division-free determinant and adjugate via subset dynamic programming.
DetAdj det_adjugate(const SeriesMatrix& x);

bool is_integral(const SeriesMatrix& x);

struct StructuredInverse {
    SeriesMatrix y;          // X * Y = q^s * Id (within the certified window)
    Series unit_quotient;    // det(X) / q^s
    unsigned s;
    unsigned certified_len;  // pi-window through which Y is certified
};
// Inverse of X whose determinant is unit * q^s, certified by exact division.
// General series-matrix inversion is deliberately absent.
StructuredInverse mat_inv_structured(const SeriesMatrix& x, unsigned s);

// Smith normal form over F_p[pi]/pi^M by valuation-pivot elimination.
// Exponent M stands for "zero at this truncation" (marker >= M).
struct PiSmithForm {
    std::vector<unsigned> exponents;  // ascending; value M means zero divisor entry
    unsigned mlen;
};
// Input: integral series matrix (rows x cols given by dims), reduced mod p.
PiSmithForm smith_pi(const std::vector<std::vector<Series>>& rows);

// Kernel of an r x c matrix over Z/p^N: generating set (echelonized via
// diagonalization) plus the mod-p dimension of the reduced-matrix kernel.
struct ZpKernel {
    std::vector<std::vector<u128>> basis;  // each of length c
    unsigned modp_dim;
};
ZpKernel zp_kernel(const ZpRing& ring, const std::vector<std::vector<u128>>& rows,
                   unsigned cols);

}  // namespace wach

#pragma once

#include <string>
#include <vector>

#include "wach/series.hpp"

namespace wach {

// Quotient ring A/(p^{Nq}, phi^{n-1}(q)) = (Z/p^{Nq})[pi]/Phi_{p^n}(1+pi).
// Elements are polynomials of degree < m = p^{n-1}(p-1).
struct CycloRing {
    ZpRing scalar_ring{};       // Z/p^{Nq}
    unsigned level = 0;         // n
    unsigned deg = 0;           // m
    std::vector<u128> modpoly;  // Phi_{p^n}(1+pi), monic of degree m, coeffs mod p^{Nq}

    static CycloRing make(u64 p, unsigned level, unsigned nq);
    bool operator==(const CycloRing& o) const {
        return scalar_ring == o.scalar_ring && level == o.level;
    }
};

struct CycloElem {
    CycloRing ring{};
    std::vector<u128> c;  // size deg

    static CycloElem zero(const CycloRing& r);
    static CycloElem scalar(const CycloRing& r, u128 v);
    bool operator==(const CycloElem& o) const { return ring == o.ring && c == o.c; }
    bool is_zero() const;
    std::string str() const;
};

// Precision available after reducing an (N, M)-series modulo phi^{n-1}(q):
// min(N, floor((M - m + 1)/m) - 1). PrecisionExhausted when < 1.
unsigned cyclo_precision(u64 p, unsigned n_prec, unsigned mlen, unsigned level);

// Weierstrass remainder of an integral series, truncated to the quotient ring.
CycloElem reduce_mod_qn(const Series& f, unsigned level);

CycloElem cyclo_add(const CycloElem& a, const CycloElem& b);
CycloElem cyclo_sub(const CycloElem& a, const CycloElem& b);
CycloElem cyclo_mul(const CycloElem& a, const CycloElem& b);
CycloElem cyclo_neg(const CycloElem& a);

// True when all coefficients in degrees 1..m-1 vanish at quotient precision.
bool is_scalar(const CycloElem& a);

// Dense matrix over the quotient ring, row-major, dim <= 8.
struct CycloMatrix {
    CycloRing ring{};
    unsigned dim = 0;
    std::vector<CycloElem> a;

    static CycloMatrix identity(const CycloRing& r, unsigned dim);
    const CycloElem& at(unsigned i, unsigned j) const { return a[i * dim + j]; }
    CycloElem& at(unsigned i, unsigned j) { return a[i * dim + j]; }
};

// Characteristic polynomial det(X*Id - A) by the division-free Berkowitz
// method (the quotient ring has zero divisors). Coefficients returned lowest
// degree first, size dim+1, leading coefficient 1.
std::vector<CycloElem> char_poly(const CycloMatrix& m);

}  // namespace wach

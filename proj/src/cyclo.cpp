#include "wach/cyclo.hpp"

#include <algorithm>

namespace wach {

CycloRing CycloRing::make(u64 p, unsigned level, unsigned nq) {
    if (nq < 1) throw PrecisionExhaustedError("quotient ring needs at least one digit");
    CycloRing r;
    r.scalar_ring = ZpRing::make(p, nq);
    r.level = level;
    r.deg = distinguished_degree(p, level);
    Series q = elem_q(r.scalar_ring, r.deg + 1, level);
    r.modpoly.assign(q.c.begin(), q.c.begin() + r.deg + 1);
    return r;
}

CycloElem CycloElem::zero(const CycloRing& r) {
    CycloElem e;
    e.ring = r;
    e.c.assign(r.deg, 0);
    return e;
}

CycloElem CycloElem::scalar(const CycloRing& r, u128 v) {
    CycloElem e = zero(r);
    e.c[0] = v % r.scalar_ring.modulus;
    return e;
}

bool CycloElem::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](u128 v) { return v == 0; });
}

std::string CycloElem::str() const {
    std::string body;
    for (unsigned k = 0; k < ring.deg; ++k) {
        if (c[k] == 0) continue;
        if (!body.empty()) body += " + ";
        if (k == 0) {
            body += dec_string(c[k]);
        } else {
            if (c[k] != 1) body += dec_string(c[k]) + "*";
            body += k == 1 ? "pi" : "pi^" + std::to_string(k);
        }
    }
    return body.empty() ? "0" : body;
}

unsigned cyclo_precision(u64 p, unsigned n_prec, unsigned mlen, unsigned level) {
    unsigned m = distinguished_degree(p, level);
    if (mlen < 2 * m) throw PrecisionExhaustedError("pi-window too short for quotient reduction");
    unsigned passes = (mlen - m + 1) / m;
    if (passes < 2) throw PrecisionExhaustedError("pi-window too short for quotient reduction");
    return std::min(n_prec, passes - 1);
}

CycloElem reduce_mod_qn(const Series& f, unsigned level) {
    if (f.denom != 0) throw UsageError("quotient reduction expects an integral series");
    unsigned nq = cyclo_precision(f.ring.p, f.ring.prec, f.mlen, level);
    CycloRing r = CycloRing::make(f.ring.p, level, nq);
    WeierstrassResult w = weierstrass_divide(f, level);
    CycloElem e = CycloElem::zero(r);
    for (unsigned k = 0; k < r.deg; ++k) e.c[k] = w.remainder[k] % r.scalar_ring.modulus;
    return e;
}

namespace {

void check_ring(const CycloElem& a, const CycloElem& b) {
    if (!(a.ring == b.ring)) throw UsageError("quotient-ring elements from different rings");
}

}  // namespace

CycloElem cyclo_add(const CycloElem& a, const CycloElem& b) {
    check_ring(a, b);
    CycloElem r = a;
    for (unsigned k = 0; k < r.ring.deg; ++k)
        r.c[k] = r.ring.scalar_ring.add(r.c[k], b.c[k]);
    return r;
}

CycloElem cyclo_sub(const CycloElem& a, const CycloElem& b) {
    check_ring(a, b);
    CycloElem r = a;
    for (unsigned k = 0; k < r.ring.deg; ++k)
        r.c[k] = r.ring.scalar_ring.sub(r.c[k], b.c[k]);
    return r;
}

CycloElem cyclo_neg(const CycloElem& a) {
    CycloElem r = a;
    for (auto& v : r.c) v = r.ring.scalar_ring.neg(v);
    return r;
}

CycloElem cyclo_mul(const CycloElem& a, const CycloElem& b) {
    check_ring(a, b);
    const ZpRing& sr = a.ring.scalar_ring;
    const unsigned m = a.ring.deg;
    std::vector<u128> prod(2 * m - 1, 0);
    for (unsigned i = 0; i < m; ++i) {
        if (a.c[i] == 0) continue;
        for (unsigned j = 0; j < m; ++j)
            prod[i + j] = sr.add(prod[i + j], sr.mul(a.c[i], b.c[j]));
    }
    // Monic polynomial remainder: fold degrees >= m down.
    for (unsigned k = 2 * m - 2; k + 1 > m; --k) {
        u128 lead = prod[k];
        if (lead == 0) continue;
        prod[k] = 0;
        for (unsigned j = 0; j < m; ++j)
            prod[k - m + j] = sr.sub(prod[k - m + j], sr.mul(lead, a.ring.modpoly[j]));
    }
    CycloElem r = CycloElem::zero(a.ring);
    for (unsigned k = 0; k < m; ++k) r.c[k] = prod[k];
    return r;
}

bool is_scalar(const CycloElem& a) {
    for (unsigned k = 1; k < a.ring.deg; ++k)
        if (a.c[k] != 0) return false;
    return true;
}

CycloMatrix CycloMatrix::identity(const CycloRing& r, unsigned dim) {
    CycloMatrix m;
    m.ring = r;
    m.dim = dim;
    m.a.assign((std::size_t)dim * dim, CycloElem::zero(r));
    for (unsigned i = 0; i < dim; ++i) m.at(i, i) = CycloElem::scalar(r, 1);
    return m;
}

std::vector<CycloElem> char_poly(const CycloMatrix& m) {
    const unsigned d = m.dim;
    const CycloRing& r = m.ring;
    if (d == 0) return {CycloElem::scalar(r, 1)};
    // Berkowitz: iteratively build the coefficient vector via Toeplitz products.
    // After step k the vector v holds char poly of the leading k x k block,
    // highest degree first, length k+1.
    std::vector<CycloElem> v{CycloElem::scalar(r, 1), cyclo_neg(m.at(0, 0))};
    for (unsigned k = 1; k < d; ++k) {
        // Row R (1 x k), column C (k x 1), leading block B (k x k).
        // Toeplitz column vector t of length k+2:
        //   t[0] = 1, t[1] = -a_kk, t[j] = -(R B^{j-2} C) for j >= 2.
        std::vector<CycloElem> t;
        t.reserve(k + 2);
        t.push_back(CycloElem::scalar(r, 1));
        t.push_back(cyclo_neg(m.at(k, k)));
        std::vector<CycloElem> w(k);  // w = B^j C
        for (unsigned i = 0; i < k; ++i) w[i] = m.at(i, k);
        for (unsigned j = 0; j + 2 <= k + 1; ++j) {
            CycloElem dot = CycloElem::zero(r);
            for (unsigned i = 0; i < k; ++i) dot = cyclo_add(dot, cyclo_mul(m.at(k, i), w[i]));
            t.push_back(cyclo_neg(dot));
            if (j + 3 <= k + 1) {
                std::vector<CycloElem> nw(k, CycloElem::zero(r));
                for (unsigned i = 0; i < k; ++i)
                    for (unsigned l = 0; l < k; ++l)
                        nw[i] = cyclo_add(nw[i], cyclo_mul(m.at(i, l), w[l]));
                w = std::move(nw);
            }
        }
        // v' = lower-triangular Toeplitz(t) * v, length k+2.
        std::vector<CycloElem> nv(k + 2, CycloElem::zero(r));
        for (unsigned i = 0; i < k + 2; ++i)
            for (unsigned j = 0; j <= i && j < v.size(); ++j)
                nv[i] = cyclo_add(nv[i], cyclo_mul(t[i - j], v[j]));
        v = std::move(nv);
    }
    // v is highest degree first; return lowest degree first.
    std::reverse(v.begin(), v.end());
    return v;
}

}  // namespace wach

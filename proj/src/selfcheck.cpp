#include "wach/selfcheck.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "wach/cyclo.hpp"
#include "wach/linalg.hpp"
#include "wach/series.hpp"

namespace wach::selfcheck {

namespace {

using boost::multiprecision::cpp_int;

u128 rand_u128(std::mt19937_64& rng, u128 bound) {
    u128 v = ((u128)rng() << 64) | rng();
    return bound ? v % bound : 0;
}

cpp_int to_big(u128 v) {
    cpp_int r = (u64)(v >> 64);
    r <<= 64;
    r += (u64)v;
    return r;
}

u128 from_big_mod(cpp_int v, const cpp_int& modulus) {
    v %= modulus;
    if (v < 0) v += modulus;
    u128 r = 0;
    cpp_int hi = v >> 64;
    r = ((u128)(u64)hi << 64) | (u64)(v & 0xffffffffffffffffULL);
    return r;
}

Series random_series(std::mt19937_64& rng, const ZpRing& ring, unsigned mlen) {
    Series s = Series::zero(ring, mlen);
    for (auto& c : s.c) c = rand_u128(rng, ring.modulus);
    return s;
}

GammaValue random_unit_gamma(std::mt19937_64& rng, u64 p) {
    u64 v;
    do {
        v = rng() % ((u64)1 << 31);
    } while (v % p == 0);
    return GammaValue::integer(dec_string(v));
}

void record(SuiteResult& r, bool ok, const std::string& what) {
    ++r.cases;
    if (!ok) {
        ++r.failures;
        if (r.first_failure.empty()) r.first_failure = what;
    }
}

}  // namespace

SuiteResult zp_against_bigint(u64 p, unsigned prec, std::size_t rounds, u64 seed) {
    SuiteResult res{"scalar ring vs bigint", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, prec);
    cpp_int big_mod = to_big(ring.modulus);
    std::mt19937_64 rng(seed);
    for (std::size_t it = 0; it < rounds; ++it) {
        u128 a = rand_u128(rng, ring.modulus), b = rand_u128(rng, ring.modulus);
        cpp_int ba = to_big(a), bb = to_big(b);
        record(res, ring.add(a, b) == from_big_mod(ba + bb, big_mod), "add");
        record(res, ring.sub(a, b) == from_big_mod(ba - bb, big_mod), "sub");
        record(res, ring.mul(a, b) == from_big_mod(ba * bb, big_mod), "mul");
        u64 e = rng() % 64;
        cpp_int bp = 1;
        for (u64 t = 0; t < e; ++t) bp = bp * ba % big_mod;
        record(res, ring.pow(a, e) == from_big_mod(bp, big_mod), "pow");
        if (a % p != 0)
            record(res, ring.mul(ring.invert(a), a) == 1 % ring.modulus, "invert");
        // Valuation vs direct division count.
        unsigned v = 0;
        cpp_int t = ba;
        while (t != 0 && t % p == 0) {
            t /= p;
            ++v;
        }
        auto got = ring.valuation(a);
        record(res, a == 0 ? !got.has_value() : (got && *got == v), "valuation");
    }
    // Teichmuller: the lift is a fixed point of x -> x^p congruent to r mod p.
    for (u64 r = 0; r < p; ++r) {
        Zp t = teichmuller(r, ring);
        record(res, ring.pow(t.residue(), p) == t.residue(), "teichmuller fixed point");
        record(res, t.residue() % p == r, "teichmuller reduction");
    }
    // Guarded binomial vs exact integer binomial.
    unsigned guard = 4;
    ZpRing guarded = ZpRing::make(p, prec + guard);
    cpp_int big_target = to_big(ring.modulus);
    for (std::size_t it = 0; it < rounds / 4 + 1; ++it) {
        u128 a = rand_u128(rng, guarded.modulus);
        u64 k = rng() % 12;
        if (factorial_valuation(k, p) > guard) continue;
        cpp_int num = 1;
        for (u64 j = 0; j < k; ++j) num *= to_big(a) - j;
        cpp_int den = 1;
        for (u64 j = 2; j <= k; ++j) den *= j;
        cpp_int want = num / den;
        Zp got = binomial_coeff(Zp(guarded, a), k, prec);
        record(res, got.residue() == from_big_mod(want, big_target), "binomial");
    }
    return res;
}

SuiteResult operator_commutation(u64 p, unsigned prec, unsigned mlen, std::size_t rounds,
                                 u64 seed) {
    SuiteResult res{"phi-gamma commutation", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, prec);
    std::mt19937_64 rng(seed);
    Substitution phi = Substitution::frobenius(ring, mlen);
    for (std::size_t it = 0; it < rounds; ++it) {
        Series f = random_series(rng, ring, mlen);
        GammaValue c = random_unit_gamma(rng, p);
        Substitution gam = Substitution::gamma(c, ring, mlen);
        record(res, gam.apply(phi.apply(f)) == phi.apply(gam.apply(f)),
               "phi gamma_" + c.label());
    }
    return res;
}

SuiteResult gamma_composition(u64 p, unsigned prec, unsigned mlen, std::size_t rounds,
                              u64 seed) {
    SuiteResult res{"gamma composition law", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, prec);
    std::mt19937_64 rng(seed);
    for (std::size_t it = 0; it < rounds; ++it) {
        Series f = random_series(rng, ring, mlen);
        GammaValue c1 = random_unit_gamma(rng, p);
        GammaValue c2 = random_unit_gamma(rng, p);
        u128 prod = (u128)parse_decimal_mod(c1.integer_factor, (u128)1 << 127) *
                    parse_decimal_mod(c2.integer_factor, (u128)1 << 127);
        GammaValue c12 = GammaValue::integer(dec_string(prod));
        Series lhs = gamma_act(c1, gamma_act(c2, f));
        Series rhs = gamma_act(c12, f);
        record(res, lhs == rhs, c1.label() + " o " + c2.label());
    }
    return res;
}

SuiteResult weierstrass_reconstruction(u64 p, unsigned prec, unsigned mlen, std::size_t rounds,
                                       u64 seed) {
    SuiteResult res{"weierstrass reconstruction", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, prec);
    std::mt19937_64 rng(seed);
    for (std::size_t it = 0; it < rounds; ++it) {
        unsigned level = 1 + (unsigned)(rng() % 2);
        if (distinguished_degree(p, level) >= mlen) level = 1;
        Series f = random_series(rng, ring, mlen);
        WeierstrassResult w = weierstrass_divide(f, level);
        Series d = elem_q(ring, mlen, level);
        Series back = series_mul(d, w.quotient);
        for (unsigned k = 0; k < w.remainder.size(); ++k)
            back.c[k] = ring.add(back.c[k], w.remainder[k]);
        record(res, back == f, "f = D*h + r");
        record(res, w.quotient_len == mlen - distinguished_degree(p, level), "window");
    }
    return res;
}

namespace {

// Minimal F_p[pi]/pi^M polynomial helpers for the minor-gcd oracle.
using Poly = std::vector<u64>;

Poly pmul(const Poly& a, const Poly& b, u64 p) {
    Poly r(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; i + j < a.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    return r;
}

Poly psub(Poly a, const Poly& b, u64 p) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    return a;
}

unsigned pval(const Poly& f) {
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k]) return (unsigned)k;
    return (unsigned)f.size();
}

// Determinant of a k x k submatrix by permutation expansion (k <= 3).
Poly pminor(const std::vector<std::vector<Poly>>& g, const std::vector<unsigned>& ri,
            const std::vector<unsigned>& ci, u64 p, unsigned mlen) {
    const unsigned k = (unsigned)ri.size();
    Poly acc(mlen, 0);
    std::vector<unsigned> perm(k);
    for (unsigned i = 0; i < k; ++i) perm[i] = i;
    do {
        unsigned inv = 0;
        for (unsigned i = 0; i < k; ++i)
            for (unsigned j = i + 1; j < k; ++j)
                if (perm[i] > perm[j]) ++inv;
        Poly term(mlen, 0);
        term[0] = 1;
        for (unsigned i = 0; i < k; ++i) term = pmul(term, g[ri[i]][ci[perm[i]]], p);
        if (inv % 2)
            acc = psub(acc, term, p);
        else
            for (std::size_t x = 0; x < acc.size(); ++x) acc[x] = (acc[x] + term[x]) % p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

}  // namespace

SuiteResult smith_minor_gcd(u64 p, unsigned mlen, unsigned dim, std::size_t rounds, u64 seed) {
    SuiteResult res{"smith form vs minor gcds", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, 1);
    std::mt19937_64 rng(seed);
    for (std::size_t it = 0; it < rounds; ++it) {
        std::vector<std::vector<Series>> rows(dim, std::vector<Series>(dim));
        std::vector<std::vector<Poly>> g(dim, std::vector<Poly>(dim, Poly(mlen, 0)));
        for (unsigned i = 0; i < dim; ++i)
            for (unsigned j = 0; j < dim; ++j) {
                Series s = random_series(rng, ring, mlen);
                // Shift by a random valuation to exercise nontrivial divisors.
                unsigned shift = (unsigned)(rng() % 4);
                for (unsigned k = mlen; k-- > 0;)
                    s.c[k] = (k >= shift) ? s.c[k - shift] : 0;
                rows[i][j] = s;
                for (unsigned k = 0; k < mlen; ++k) g[i][j][k] = (u64)(s.c[k] % p);
            }
        PiSmithForm sf = smith_pi(rows);
        // Oracle: e_t = (min valuation over t-minors) - (min over (t-1)-minors).
        std::vector<unsigned> gmin(dim + 1, 0);
        for (unsigned t = 1; t <= dim; ++t) {
            unsigned best = mlen;
            auto choose = [&](auto&& self, unsigned start, unsigned need,
                              std::vector<unsigned>& out,
                              std::vector<std::vector<unsigned>>& all) -> void {
                if (need == 0) {
                    all.push_back(out);
                    return;
                }
                for (unsigned v = start; v + need <= dim; ++v) {
                    out.push_back(v);
                    self(self, v + 1, need - 1, out, all);
                    out.pop_back();
                }
            };
            std::vector<std::vector<unsigned>> rsets, csets;
            std::vector<unsigned> tmp;
            choose(choose, 0, t, tmp, rsets);
            choose(choose, 0, t, tmp, csets);
            for (const auto& rs : rsets)
                for (const auto& cs : csets)
                    best = std::min(best, pval(pminor(g, rs, cs, p, mlen)));
            gmin[t] = best;
        }
        // Minor minima only pin the cumulative sums below the truncation:
        // sum_{i<=t} e_i == gmin[t] when gmin[t] < mlen, and >= mlen otherwise.
        bool ok = true;
        unsigned cum = 0;
        for (unsigned t = 1; t <= dim; ++t) {
            unsigned e = std::min(sf.exponents[t - 1], mlen);
            cum = std::min(cum + e, mlen);
            if (t > 1 && sf.exponents[t - 2] > sf.exponents[t - 1]) ok = false;
            if (gmin[t] < mlen ? (cum != gmin[t]) : (cum < mlen)) ok = false;
        }
        record(res, ok, "invariant factors mismatch");
    }
    return res;
}

SuiteResult berkowitz_vs_cofactor(u64 p, unsigned level, unsigned nq, unsigned dim,
                                  std::size_t rounds, u64 seed) {
    SuiteResult res{"char poly vs cofactor oracle", 0, 0, ""};
    CycloRing ring = CycloRing::make(p, level, nq);
    std::mt19937_64 rng(seed);
    for (std::size_t it = 0; it < rounds; ++it) {
        bool constants = it % 2 == 0;
        CycloMatrix m = CycloMatrix::identity(ring, dim);
        for (unsigned i = 0; i < dim; ++i)
            for (unsigned j = 0; j < dim; ++j) {
                CycloElem e = CycloElem::zero(ring);
                unsigned terms = constants ? 1 : ring.deg;
                for (unsigned k = 0; k < terms; ++k)
                    e.c[k] = rand_u128(rng, ring.scalar_ring.modulus);
                m.at(i, j) = e;
            }
        std::vector<CycloElem> got = char_poly(m);
        // Oracle: permutation expansion of det(X*Id - A) with polynomial
        // coefficients over the quotient ring.
        std::vector<CycloElem> want(dim + 1, CycloElem::zero(ring));
        std::vector<unsigned> perm(dim);
        for (unsigned i = 0; i < dim; ++i) perm[i] = i;
        do {
            unsigned inv = 0;
            for (unsigned i = 0; i < dim; ++i)
                for (unsigned j = i + 1; j < dim; ++j)
                    if (perm[i] > perm[j]) ++inv;
            std::vector<CycloElem> term(dim + 1, CycloElem::zero(ring));
            term[0] = CycloElem::scalar(ring, 1);
            unsigned deg = 0;
            for (unsigned i = 0; i < dim; ++i) {
                // multiply by (X*delta - a_{i,perm(i)})
                std::vector<CycloElem> nt(dim + 1, CycloElem::zero(ring));
                CycloElem a = m.at(i, perm[i]);
                for (unsigned k = 0; k <= deg; ++k) {
                    if (i == perm[i]) nt[k + 1] = cyclo_add(nt[k + 1], term[k]);
                    nt[k] = cyclo_sub(nt[k], cyclo_mul(a, term[k]));
                }
                term = std::move(nt);
                if (i == perm[i]) ++deg;
            }
            for (unsigned k = 0; k <= dim; ++k)
                want[k] = (inv % 2) ? cyclo_sub(want[k], term[k]) : cyclo_add(want[k], term[k]);
        } while (std::next_permutation(perm.begin(), perm.end()));
        bool ok = true;
        for (unsigned k = 0; k <= dim; ++k)
            if (!(got[k] == want[k])) ok = false;
        record(res, ok, constants ? "constant matrix" : "full quotient-ring matrix");
    }
    return res;
}

SuiteResult mu_lemma_identities(u64 p, unsigned prec, unsigned mlen) {
    SuiteResult res{"mu-q congruences", 0, 0, ""};
    ZpRing ring = ZpRing::make(p, prec);
    Series q = elem_q(ring, mlen, 1);
    Series mu = elem_mu(ring, mlen);
    record(res, mu.c[0] == 1 % ring.modulus, "mu(0) = 1");
    record(res, q.c[0] == p % ring.modulus, "q(0) = p");
    record(res, q.c[p - 1] == 1 % ring.modulus, "q monic of degree p-1");
    Series qmu = series_mul(q, mu);
    Series acc = Series::constant(ring, mlen, 1);
    u128 ppow = 1 % ring.modulus;
    for (unsigned s = 1; s + 1 <= p - 1; ++s) {
        acc = series_mul(acc, qmu);
        ppow = ring.mul(ppow, p % ring.modulus);
        bool ok = acc.c[0] == ppow;
        for (unsigned k = 1; k < p - 1; ++k) ok = ok && acc.c[k] == 0;
        record(res, ok, "mu^s q^s = p^s mod pi^{p-1} at s=" + std::to_string(s));
    }
    // (q - pi^{p-1})/p is the exact inverse of mu.
    Series inv_mu = series_invert(mu);
    Series lhs = series_scalar_mul(inv_mu, p % ring.modulus);
    Series rhs = q;
    rhs.c[p - 1] = ring.sub(rhs.c[p - 1], 1 % ring.modulus);
    record(res, lhs == rhs, "p*mu^{-1} = q - pi^{p-1}");
    return res;
}

std::vector<SuiteResult> run_all(u64 p, u64 seed) {
    std::vector<SuiteResult> out;
    out.push_back(zp_against_bigint(p, 6, 200, seed));
    out.push_back(operator_commutation(p, 4, 4 * (unsigned)(p - 1) + 4, 40, seed + 1));
    out.push_back(gamma_composition(p, 4, 4 * (unsigned)(p - 1) + 4, 40, seed + 2));
    out.push_back(weierstrass_reconstruction(p, 4, 3 * (unsigned)(p - 1) + 6, 100, seed + 3));
    out.push_back(smith_minor_gcd(p, 8, 3, 100, seed + 4));
    out.push_back(berkowitz_vs_cofactor(p, 1, 2, 3, 50, seed + 5));
    out.push_back(mu_lemma_identities(p, 6, 3 * (unsigned)(p - 1) + 2));
    return out;
}

}  // namespace wach::selfcheck

#pragma once

#include <string>
#include <vector>

#include "wach/kernels.hpp"
#include "wach/zp.hpp"

namespace wach {

// Truncated power series p^{-denom} * (c[0] + c[1]*pi + ... + c[M-1]*pi^{M-1})
// with every numerator coefficient a residue mod p^N. The element is exact
// modulo p^{-denom}(p^N, pi^M); the guaranteed p-adic precision is N - denom,
// which must stay positive.
struct Series {
    ZpRing ring{};
    unsigned mlen = 0;
    unsigned denom = 0;
    std::vector<u128> c;

    static Series zero(const ZpRing& ring, unsigned mlen, unsigned denom = 0);
    static Series constant(const ZpRing& ring, unsigned mlen, u128 value);
    static Series pi_power(const ZpRing& ring, unsigned mlen, unsigned k);
    static Series from_coeffs(const ZpRing& ring, unsigned mlen, std::vector<u128> coeffs,
                              unsigned denom = 0);

    u128 coeff(unsigned k) const { return k < mlen ? c[k] : 0; }
    bool is_zero() const;
    bool integral() const { return denom == 0; }
    unsigned guaranteed_prec() const { return ring.prec - denom; }
    bool operator==(const Series& o) const;

    std::string str() const;  // canonical rendering "p^-e * (c0 + c1*pi + ...)"
};

void require_same_frame(const Series& a, const Series& b);

Series series_add(const Series& a, const Series& b);
Series series_sub(const Series& a, const Series& b);
Series series_mul(const Series& a, const Series& b, kernels::Exec exec = kernels::Exec::Auto);
Series series_scalar_mul(const Series& a, u128 s);
Series series_neg(const Series& a);

// Strip the largest power of p common to the denominator and all coefficients.
Series normalize(const Series& a);

// pi-adic valuation of the numerator at working precision; nullopt = all
// coefficients vanish mod p^N.
std::optional<unsigned> pi_valuation(const Series& a);

// Reduce coefficients into precision `prec` (denominator kept; requires
// prec > denom so the guaranteed precision stays positive).
Series truncate_prec(const Series& a, unsigned prec);

// Inverse of a series whose normalization has unit constant term.
Series series_invert(const Series& a);

// f(g) for integral g with exactly vanishing constant term, Horner from the
// top coefficient down.
Series series_compose(const Series& f, const Series& g, kernels::Exec exec = kernels::Exec::Auto);

// (1 + pi)^e for a plain integer exponent, by binary exponentiation. Exact.
Series one_plus_pi_pow_int(const ZpRing& ring, unsigned mlen, u128 e);

// (1 + pi)^c with c a unit carried at precision target + v_p((M-1)!);
// coefficient k is binomial_coeff(c, k) at the target precision.
Series one_plus_pi_pow(const Zp& c_guarded, unsigned target_prec, unsigned mlen);

unsigned binomial_guard_digits(u64 p, unsigned mlen);  // v_p((M-1)!)

// Reusable substitution pi -> g (c0(g) = 0 exact, g integral).
struct Substitution {
    Series g;

    static Substitution frobenius(const ZpRing& ring, unsigned mlen);
    static Substitution gamma(const Zp& c_guarded, const ZpRing& ring, unsigned mlen);
    static Substitution gamma(const GammaValue& c, const ZpRing& ring, unsigned mlen);

    Series apply(const Series& f, kernels::Exec exec = kernels::Exec::Auto) const;
};

Series frobenius(const Series& f);
Series gamma_act(const GammaValue& c, const Series& f);

// gamma_c(pi)/pi = sum_k C(c, k+1) pi^k. Unit with constant term c.
Series gamma_pi_unit(const GammaValue& c, const ZpRing& ring, unsigned mlen);

// phi^{n-1}(q) = Phi_{p^n}(1 + pi) = sum_{j<p} (1+pi)^{j p^{n-1}}, a monic
// distinguished polynomial of degree m = p^{n-1}(p-1) with constant term p.
// Requires m < M.
Series elem_q(const ZpRing& ring, unsigned mlen, unsigned level);
unsigned distinguished_degree(u64 p, unsigned level);  // p^{n-1}(p-1)

// mu = ((q - pi^{p-1})/p)^{-1}; mu(0) = 1 and mu*q = p mod pi^{p-1}.
Series elem_mu(const ZpRing& ring, unsigned mlen);

// log(1 + pi) = sum (-1)^{k+1} pi^k / k, carried with denominator max v_p(k).
Series log_one_plus_pi(const ZpRing& ring, unsigned mlen);

struct TProduct {
    Series value;            // pi * prod_{n<=L, factor != 1} phi^{n-1}(q)/p
    unsigned denom_used;     // number of 1/p factors actually included
    unsigned guarantee;      // certified digits of agreement with log(1+pi)
};

// Truncated decomposition of t. L < N - 1; factors identical to 1 at working
// precision are skipped. The agreement guarantee is computed, not assumed.
TProduct t_product(const ZpRing& ring, unsigned mlen, unsigned L);

struct WeierstrassResult {
    Series quotient;          // certified through pi^{quotient_len}, zero beyond
    std::vector<u128> remainder;  // degree < m, coefficients mod p^N
    unsigned quotient_len;    // M - m
};

// Division f = D*h + r by D = phi^{n-1}(q), via N mod-p refinement passes.
WeierstrassResult weierstrass_divide(const Series& f, unsigned level);

bool remainder_is_zero(const std::vector<u128>& rem);

struct PiPower {
    unsigned k;
};
struct QPower {
    unsigned level;
    unsigned k;
};

// Exact division; NotDivisible (with remainder evidence) when any remainder
// is nonzero at working precision.
Series divide_exact(const Series& f, PiPower d);
struct ExactQuotient {
    Series quotient;
    unsigned certified_len;  // quotient certified through this pi-length
};
ExactQuotient divide_exact(const Series& f, QPower d);

// p-precision certified for coefficient j of a quotient whose pi-window is
// `window`: one digit per m degrees of headroom, capped at ring precision.
unsigned staircase_precision(const ZpRing& rg, unsigned window, unsigned j, unsigned m);

// Generator pi^{j0} * prod_n phi^{n-1}(q)^{js[n]} (optionally /p per q-factor).
struct IdealGenerator {
    unsigned j0 = 0;
    std::vector<unsigned> js;  // js[i] = exponent of phi^{i}(q), levels 1..
    bool denom = false;        // divide each q-factor by p
};

Series build_generator(const ZpRing& ring, unsigned mlen, const IdealGenerator& g);

struct StabilityResult {
    bool stable = false;
    IdealGenerator form{};     // recovered factorization (valid when stable)
    Series unit;               // certificate u with gamma_c(g) = u * g
    std::string evidence;      // failing remainder / non-unit cofactor when not stable
};

// Decides Gamma-stability for elements of the factored shape
// pi^{j0} prod phi^{n-1}(q)^{j_n} * unit; anything else is NotStable with
// evidence. The factorization is recovered from f itself.
StabilityResult is_gamma_stable(const Series& f, const GammaValue& c);

}  // namespace wach

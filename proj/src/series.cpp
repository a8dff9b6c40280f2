#include "wach/series.hpp"

#include <algorithm>
#include <cassert>

namespace wach {

namespace {

void check_frame(const ZpRing& ring, unsigned mlen, unsigned denom) {
    if (mlen < 1) throw UsageError("series length M must be >= 1");
    if (denom >= ring.prec)
        throw DenominatorOverflowError("denominator exponent " + std::to_string(denom) +
                                       " reaches precision " + std::to_string(ring.prec));
}

u128 pow_small(u64 p, unsigned e) {
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) r *= p;
    return r;
}

}  // namespace

Series Series::zero(const ZpRing& ring, unsigned mlen, unsigned denom) {
    check_frame(ring, mlen, denom);
    Series s;
    s.ring = ring;
    s.mlen = mlen;
    s.denom = denom;
    s.c.assign(mlen, 0);
    return s;
}

Series Series::constant(const ZpRing& ring, unsigned mlen, u128 value) {
    Series s = zero(ring, mlen);
    s.c[0] = value % ring.modulus;
    return s;
}

Series Series::pi_power(const ZpRing& ring, unsigned mlen, unsigned k) {
    Series s = zero(ring, mlen);
    if (k >= mlen) throw TruncationTooShortError("pi^k with k >= M");
    s.c[k] = 1;
    return s;
}

Series Series::from_coeffs(const ZpRing& ring, unsigned mlen, std::vector<u128> coeffs,
                           unsigned denom) {
    Series s = zero(ring, mlen, denom);
    if (coeffs.size() > mlen) throw UsageError("coefficient list longer than M");
    for (std::size_t i = 0; i < coeffs.size(); ++i) s.c[i] = coeffs[i] % ring.modulus;
    return s;
}

bool Series::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](u128 v) { return v == 0; });
}

bool Series::operator==(const Series& o) const {
    return ring == o.ring && mlen == o.mlen && denom == o.denom && c == o.c;
}

std::string Series::str() const {
    std::string body;
    for (unsigned k = 0; k < mlen; ++k) {
        if (c[k] == 0) continue;
        if (!body.empty()) body += " + ";
        if (k == 0) {
            body += dec_string(c[k]);
        } else {
            if (c[k] != 1) body += dec_string(c[k]) + "*";
            body += k == 1 ? "pi" : "pi^" + std::to_string(k);
        }
    }
    if (body.empty()) body = "0";
    std::string out = "(" + body + ")";
    if (denom > 0) out = dec_string(ring.p) + "^-" + std::to_string(denom) + " * " + out;
    return out;
}

void require_same_frame(const Series& a, const Series& b) {
    if (!(a.ring == b.ring) || a.mlen != b.mlen)
        throw UsageError("series frames differ (p, N, M must match)");
}

namespace {

// Raise a's denominator to `target` by scaling coefficients with p^{target-e}.
Series with_denom(const Series& a, unsigned target) {
    if (a.denom == target) return a;
    assert(target > a.denom);
    Series r = a;
    u128 scale = pow_small(a.ring.p, target - a.denom) % a.ring.modulus;
    for (auto& v : r.c) v = a.ring.mul(v, scale);
    r.denom = target;
    check_frame(r.ring, r.mlen, r.denom);
    return r;
}

}  // namespace

Series series_add(const Series& a, const Series& b) {
    require_same_frame(a, b);
    unsigned e = std::max(a.denom, b.denom);
    Series x = with_denom(a, e), y = with_denom(b, e);
    for (unsigned k = 0; k < x.mlen; ++k) x.c[k] = x.ring.add(x.c[k], y.c[k]);
    return x;
}

Series series_sub(const Series& a, const Series& b) {
    require_same_frame(a, b);
    unsigned e = std::max(a.denom, b.denom);
    Series x = with_denom(a, e), y = with_denom(b, e);
    for (unsigned k = 0; k < x.mlen; ++k) x.c[k] = x.ring.sub(x.c[k], y.c[k]);
    return x;
}

Series series_mul(const Series& a, const Series& b, kernels::Exec exec) {
    require_same_frame(a, b);
    unsigned e = a.denom + b.denom;
    if (e >= a.ring.prec)
        throw DenominatorOverflowError("product denominator " + std::to_string(e) +
                                       " reaches precision " + std::to_string(a.ring.prec));
    Series r = Series::zero(a.ring, a.mlen, e);
    kernels::conv(a.c.data(), a.mlen, b.c.data(), b.mlen, r.c.data(), r.mlen, a.ring, exec);
    return r;
}

Series series_scalar_mul(const Series& a, u128 s) {
    Series r = a;
    s %= a.ring.modulus;
    for (auto& v : r.c) v = a.ring.mul(v, s);
    return r;
}

Series series_neg(const Series& a) {
    Series r = a;
    for (auto& v : r.c) v = a.ring.neg(v);
    return r;
}

Series normalize(const Series& a) {
    if (a.denom == 0) return a;
    unsigned minv = a.ring.prec;
    for (u128 v : a.c) {
        auto val = a.ring.valuation(v);
        if (val && *val < minv) minv = *val;
    }
    if (minv == a.ring.prec) {
        // Numerator vanishes at working precision.
        return Series::zero(a.ring, a.mlen, 0);
    }
    unsigned s = std::min(a.denom, minv);
    if (s == 0) return a;
    Series r = a;
    u128 ps = pow_small(a.ring.p, s);
    for (auto& v : r.c) v /= ps;
    r.denom -= s;
    return r;
}

std::optional<unsigned> pi_valuation(const Series& a) {
    for (unsigned k = 0; k < a.mlen; ++k)
        if (a.c[k] != 0) return k;
    return std::nullopt;
}

Series truncate_prec(const Series& a, unsigned prec) {
    if (prec == a.ring.prec) return a;
    if (prec > a.ring.prec) throw UsageError("cannot raise precision by truncation");
    if (prec <= a.denom)
        throw DenominatorOverflowError("truncation would exhaust the denominator budget");
    ZpRing r = ZpRing::make(a.ring.p, prec);
    Series out = Series::zero(r, a.mlen, a.denom);
    for (unsigned k = 0; k < a.mlen; ++k) out.c[k] = a.c[k] % r.modulus;
    return out;
}

Series series_invert(const Series& a) {
    Series n = normalize(a);
    if (n.c[0] % n.ring.p == 0)
        throw NotAUnitError("series constant term " + dec_string(n.c[0]) +
                            " is not a unit after normalization");
    const ZpRing& rg = n.ring;
    std::vector<u128> inv(n.mlen, 0);
    u128 c0i = rg.invert(n.c[0]);
    inv[0] = c0i;
    for (unsigned k = 1; k < n.mlen; ++k) {
        u128 acc = 0;
        for (unsigned j = 1; j <= k; ++j) acc = rg.add(acc, rg.mul(n.c[j], inv[k - j]));
        inv[k] = rg.mul(rg.neg(acc), c0i);
    }
    // f = p^{-e} F  =>  f^{-1} = p^{e} F^{-1}, integral.
    Series r = Series::from_coeffs(rg, n.mlen, std::move(inv), 0);
    if (n.denom > 0) r = series_scalar_mul(r, pow_small(rg.p, n.denom) % rg.modulus);
    return r;
}

Series series_compose(const Series& f, const Series& g, kernels::Exec exec) {
    require_same_frame(f, g);
    if (g.denom != 0 || g.c[0] != 0)
        throw CompositionDomainError("substitution argument must be integral with c0 = 0");
    Series acc = Series::constant(f.ring, f.mlen, f.c[f.mlen - 1]);
    for (unsigned k = f.mlen - 1; k-- > 0;) {
        acc = series_mul(acc, g, exec);
        acc.c[0] = f.ring.add(acc.c[0], f.c[k]);
    }
    acc.denom = f.denom;
    check_frame(acc.ring, acc.mlen, acc.denom);
    return acc;
}

Series one_plus_pi_pow_int(const ZpRing& ring, unsigned mlen, u128 e) {
    Series base = Series::constant(ring, mlen, 1);
    if (mlen > 1) base.c[1] = 1;
    Series acc = Series::constant(ring, mlen, 1);
    while (e) {
        if (e & 1) acc = series_mul(acc, base);
        e >>= 1;
        if (e) base = series_mul(base, base);
    }
    return acc;
}

unsigned binomial_guard_digits(u64 p, unsigned mlen) {
    return mlen >= 2 ? factorial_valuation(mlen - 1, p) : 0;
}

Series one_plus_pi_pow(const Zp& c_guarded, unsigned target_prec, unsigned mlen) {
    unsigned need = target_prec + binomial_guard_digits(c_guarded.p(), mlen);
    if (c_guarded.prec() < need)
        throw PrecisionError("exponent carries " + std::to_string(c_guarded.prec()) +
                             " digits, needs " + std::to_string(need));
    if (!c_guarded.is_unit()) throw NotAUnitError("exponent must be a unit");
    ZpRing target = ZpRing::make(c_guarded.p(), target_prec);
    Series out = Series::zero(target, mlen);
    for (unsigned k = 0; k < mlen; ++k)
        out.c[k] = binomial_coeff(c_guarded, k, target_prec).residue();
    return out;
}

Substitution Substitution::frobenius(const ZpRing& ring, unsigned mlen) {
    Series g = one_plus_pi_pow_int(ring, mlen, ring.p);
    g.c[0] = ring.sub(g.c[0], 1 % ring.modulus);
    assert(g.c[0] == 0);
    return Substitution{std::move(g)};
}

Substitution Substitution::gamma(const Zp& c_guarded, const ZpRing& ring, unsigned mlen) {
    Series g = one_plus_pi_pow(c_guarded, ring.prec, mlen);
    g.c[0] = ring.sub(g.c[0], 1 % ring.modulus);
    assert(g.c[0] == 0);
    return Substitution{std::move(g)};
}

Substitution Substitution::gamma(const GammaValue& c, const ZpRing& ring, unsigned mlen) {
    ZpRing guarded = ZpRing::make(ring.p, ring.prec + binomial_guard_digits(ring.p, mlen));
    return gamma(c.realize(guarded), ring, mlen);
}

Series Substitution::apply(const Series& f, kernels::Exec exec) const {
    return series_compose(f, g, exec);
}

Series frobenius(const Series& f) {
    return Substitution::frobenius(f.ring, f.mlen).apply(f);
}

Series gamma_act(const GammaValue& c, const Series& f) {
    return Substitution::gamma(c, f.ring, f.mlen).apply(f);
}

Series gamma_pi_unit(const GammaValue& c, const ZpRing& ring, unsigned mlen) {
    unsigned guard = factorial_valuation(mlen, ring.p);
    ZpRing guarded = ZpRing::make(ring.p, ring.prec + guard);
    Zp cg = c.realize(guarded);
    if (!cg.is_unit()) throw NotAUnitError("gamma character value must be a unit");
    Series out = Series::zero(ring, mlen);
    for (unsigned k = 0; k < mlen; ++k)
        out.c[k] = binomial_coeff(cg, (u64)k + 1, ring.prec).residue();
    return out;
}

unsigned distinguished_degree(u64 p, unsigned level) {
    if (level < 1) throw UsageError("cyclotomic level must be >= 1");
    u128 m = p - 1;
    for (unsigned i = 1; i < level; ++i) {
        m *= p;
        if (m > (u128)1 << 40) throw TruncationTooShortError("cyclotomic degree out of range");
    }
    return (unsigned)m;
}

namespace {

// sum_{j<p} (1+pi)^{j p^{n-1}} without the degree-fits check.
Series cyclotomic_sum(const ZpRing& ring, unsigned mlen, unsigned level) {
    u128 step = 1;
    for (unsigned i = 1; i < level; ++i) step *= ring.p;
    Series b = one_plus_pi_pow_int(ring, mlen, step);
    Series acc = Series::constant(ring, mlen, 1);
    Series pw = Series::constant(ring, mlen, 1);
    for (u64 j = 1; j < ring.p; ++j) {
        pw = series_mul(pw, b);
        acc = series_add(acc, pw);
    }
    return acc;
}

}  // namespace

Series elem_q(const ZpRing& ring, unsigned mlen, unsigned level) {
    unsigned m = distinguished_degree(ring.p, level);
    if (m >= mlen)
        throw TruncationTooShortError("distinguished degree " + std::to_string(m) +
                                      " needs M > " + std::to_string(m));
    Series q = cyclotomic_sum(ring, mlen, level);
    assert(q.c[m] == 1 % ring.modulus);
    return q;
}

Series elem_mu(const ZpRing& ring, unsigned mlen) {
    ZpRing lifted = ZpRing::make(ring.p, ring.prec + 1);
    Series q = elem_q(lifted, mlen, 1);
    q.c[ring.p - 1] = lifted.sub(q.c[ring.p - 1], 1);  // q - pi^{p-1}
    Series body = Series::zero(ring, mlen);
    for (unsigned k = 0; k < mlen; ++k) {
        if (q.c[k] % ring.p != 0)
            throw IntegralityViolationError("q - pi^{p-1} coefficient not divisible by p");
        body.c[k] = (q.c[k] / ring.p) % ring.modulus;
    }
    return series_invert(body);
}

Series log_one_plus_pi(const ZpRing& ring, unsigned mlen) {
    unsigned e = 0;
    for (unsigned k = 1; k < mlen; ++k) e = std::max(e, factorial_valuation(k, ring.p) -
                                                            factorial_valuation(k - 1, ring.p));
    // e = max v_p(k) for k < M
    if (e >= ring.prec)
        throw DenominatorOverflowError("log denominators exhaust precision at this M");
    Series out = Series::zero(ring, mlen, e);
    for (unsigned k = 1; k < mlen; ++k) {
        unsigned vk = 0;
        u64 u = k;
        while (u % ring.p == 0) {
            u /= ring.p;
            ++vk;
        }
        u128 coeff = ring.mul(pow_small(ring.p, e - vk) % ring.modulus, ring.invert(u % ring.modulus));
        out.c[k] = (k % 2 == 1) ? coeff : ring.neg(coeff);
    }
    return out;
}

TProduct t_product(const ZpRing& ring, unsigned mlen, unsigned L) {
    if (L + 1 >= ring.prec)
        throw DenominatorOverflowError("t_product budget requires L < N - 1");
    Series num = Series::pi_power(ring, mlen, 1);
    unsigned used = 0;
    for (unsigned n = 1; n <= L; ++n) {
        Series fac = cyclotomic_sum(ring, mlen, n);
        // Skip factors identical to 1 at working precision (factor = num/p).
        Series dev = fac;
        dev.c[0] = ring.sub(dev.c[0], ring.p % ring.modulus);
        if (dev.is_zero()) continue;
        num = series_mul(num, fac);
        ++used;
    }
    Series value = num;
    value.denom = used;
    check_frame(value.ring, value.mlen, value.denom);

    Series lg = log_one_plus_pi(ring, mlen);
    Series diff = series_sub(value, lg);
    unsigned e_d = diff.denom;
    unsigned min_num_val = ring.prec;
    for (u128 v : diff.c) {
        auto val = ring.valuation(v);
        if (val && *val < min_num_val) min_num_val = *val;
    }
    unsigned guarantee = min_num_val > e_d ? min_num_val - e_d : 0;
    guarantee = std::min(guarantee, ring.prec - e_d);
    return TProduct{value, used, guarantee};
}

WeierstrassResult weierstrass_divide(const Series& f, unsigned level) {
    if (f.denom != 0) throw UsageError("weierstrass_divide expects an integral series");
    const ZpRing& rg = f.ring;
    unsigned m = distinguished_degree(rg.p, level);
    if (m >= f.mlen) throw TruncationTooShortError("weierstrass divisor degree >= M");
    Series d = elem_q(rg, f.mlen, level);
    // D - pi^m: degree < m, every coefficient divisible by p.
    std::vector<u128> dlow(d.c.begin(), d.c.begin() + m);
    const unsigned qlen = f.mlen - m;
    std::vector<u128> g = f.c;
    std::vector<u128> h(f.mlen, 0), r(m, 0), h0(qlen, 0), prod(f.mlen, 0);
    for (unsigned pass = 0; pass < rg.prec; ++pass) {
        for (unsigned k = 0; k < m; ++k) r[k] = rg.add(r[k], g[k]);
        for (unsigned k = 0; k < qlen; ++k) h0[k] = g[m + k];
        for (unsigned k = 0; k < qlen; ++k) h[k] = rg.add(h[k], h0[k]);
        std::fill(prod.begin(), prod.end(), 0);
        kernels::conv(dlow.data(), m, h0.data(), qlen, prod.data(), f.mlen, rg);
        for (unsigned k = 0; k < f.mlen; ++k) g[k] = rg.neg(prod[k]);
    }
    assert(std::all_of(g.begin(), g.end(), [](u128 v) { return v == 0; }));
    WeierstrassResult out{Series::from_coeffs(rg, f.mlen, std::move(h), 0), std::move(r), qlen};
    return out;
}

bool remainder_is_zero(const std::vector<u128>& rem) {
    return std::all_of(rem.begin(), rem.end(), [](u128 v) { return v == 0; });
}

Series divide_exact(const Series& f, PiPower d) {
    if (d.k >= f.mlen) throw UsageError("pi-power exponent must be < M");
    for (unsigned k = 0; k < d.k; ++k) {
        if (f.c[k] != 0)
            throw NotDivisibleError("pi^" + std::to_string(d.k) + " does not divide: pi^" +
                                    std::to_string(k) + " coefficient is " + dec_string(f.c[k]));
    }
    Series r = Series::zero(f.ring, f.mlen, f.denom);
    for (unsigned k = d.k; k < f.mlen; ++k) r.c[k - d.k] = f.c[k];
    return r;
}

// Certified p-precision of coefficient j when the series is only known
// through a pi-window of `window` coefficients and division noise grows by
// one p-digit per `m` degrees of descent. Coefficients this far below the
// window edge are pinned to full ring precision.
unsigned staircase_precision(const ZpRing& rg, unsigned window, unsigned j, unsigned m) {
    if (j >= window) return 0;
    unsigned steps = (window - j + m - 1) / m;
    return std::min<unsigned>(rg.prec, steps);
}

ExactQuotient divide_exact(const Series& f, QPower d) {
    if (f.denom != 0) throw UsageError("q-power division expects an integral series");
    unsigned m = distinguished_degree(f.ring.p, d.level);
    Series cur = f;
    unsigned window = f.mlen;
    for (unsigned i = 0; i < d.k; ++i) {
        if (window <= m)
            throw PrecisionExhaustedError("q-power division exhausted the pi-window after " +
                                          std::to_string(i) + " steps");
        WeierstrassResult w = weierstrass_divide(cur, d.level);
        // The input is certified only on a p-precision staircase below its
        // window; remainder digits inside that staircase are indistinguishable
        // from zero and do not refute divisibility.
        bool divisible = true;
        for (unsigned j = 0; j < w.remainder.size() && divisible; ++j) {
            if (w.remainder[j] == 0) continue;
            u128 tol = 1;
            unsigned prec = staircase_precision(f.ring, window, j, m);
            for (unsigned t = 0; t < prec; ++t) tol *= f.ring.p;
            divisible = w.remainder[j] % tol == 0;
        }
        if (!divisible) {
            std::string ev = "step " + std::to_string(i) + " remainder (";
            for (unsigned k = 0; k < w.remainder.size(); ++k) {
                if (k) ev += ", ";
                ev += dec_string(w.remainder[k]);
            }
            throw NotDivisibleError("q-power does not divide: " + ev + ")");
        }
        cur = w.quotient;
        window -= m;
    }
    return ExactQuotient{cur, window};
}

Series build_generator(const ZpRing& ring, unsigned mlen, const IdealGenerator& g) {
    Series acc = Series::pi_power(ring, mlen, 0);
    if (g.j0 > 0) acc = Series::pi_power(ring, mlen, g.j0);
    unsigned qfactors = 0;
    for (std::size_t i = 0; i < g.js.size(); ++i) {
        unsigned level = (unsigned)i + 1;
        for (unsigned t = 0; t < g.js[i]; ++t) {
            acc = series_mul(acc, elem_q(ring, mlen, level));
            ++qfactors;
        }
    }
    if (g.denom) {
        if (qfactors >= ring.prec)
            throw DenominatorOverflowError("generator denominators exhaust precision");
        acc.denom = qfactors;
    }
    return acc;
}

StabilityResult is_gamma_stable(const Series& f, const GammaValue& c) {
    StabilityResult res;
    Series work = normalize(f);
    if (work.denom != 0) {
        // Common p-powers scale the ideal by a unit times p; stability is unaffected.
        work.denom = 0;
    }
    auto j0 = pi_valuation(work);
    if (!j0) {
        res.evidence = "series vanishes at working precision";
        return res;
    }
    IdealGenerator form;
    form.j0 = *j0;
    if (form.j0 > 0) work = divide_exact(work, PiPower{form.j0});

    const ZpRing& rg = work.ring;
    unsigned window = work.mlen - form.j0;
    unsigned level = 1;
    while (true) {
        unsigned m;
        try {
            m = distinguished_degree(rg.p, level);
        } catch (const TruncationTooShortError&) {
            break;
        }
        if (m >= window || m >= work.mlen) break;
        unsigned count = 0;
        while (window > m) {
            WeierstrassResult w = weierstrass_divide(work, level);
            if (!remainder_is_zero(w.remainder)) break;
            work = w.quotient;
            window -= m;
            ++count;
        }
        form.js.resize(level, 0);
        form.js[level - 1] = count;
        ++level;
    }
    while (!form.js.empty() && form.js.back() == 0) form.js.pop_back();

    Series cof = normalize(work);
    if (cof.c[0] % rg.p != 0 && cof.denom == 0) {
        // Unit cofactor: the element is of the stable factored shape.
        res.stable = true;
        res.form = form;
        Series u_c = gamma_pi_unit(c, rg, work.mlen);
        Series unit = Series::constant(rg, work.mlen, 1);
        for (unsigned t = 0; t < form.j0; ++t) unit = series_mul(unit, u_c);
        if (!form.js.empty()) {
            Series u_gamma = series_mul(frobenius(u_c), series_invert(u_c));
            for (std::size_t i = 0; i < form.js.size(); ++i) {
                Series ug = u_gamma;
                for (unsigned lv = 1; lv <= (unsigned)i; ++lv) ug = frobenius(ug);
                for (unsigned t = 0; t < form.js[i]; ++t) unit = series_mul(unit, ug);
            }
        }
        unit = series_mul(unit, series_mul(gamma_act(c, cof), series_invert(cof)));
        res.unit = std::move(unit);
        return res;
    }
    res.evidence = "cofactor is not a unit: " + cof.str();
    return res;
}

}  // namespace wach

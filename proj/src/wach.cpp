#include "wach/wach.hpp"

#include <algorithm>

namespace wach {

namespace {

Series series_pow(const Series& base, unsigned e) {
    Series acc = Series::constant(base.ring, base.mlen, 1);
    for (unsigned i = 0; i < e; ++i) acc = series_mul(acc, base);
    return acc;
}

// First `count` pi-coefficients of every entry vanish exactly.
bool low_coeffs_vanish(const SeriesMatrix& x, unsigned count, std::string* where) {
    for (unsigned i = 0; i < x.dim; ++i)
        for (unsigned j = 0; j < x.dim; ++j)
            for (unsigned k = 0; k < count; ++k)
                if (x.at(i, j).c[k] != 0) {
                    if (where)
                        *where = "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") pi^" + std::to_string(k) + " = " +
                                 dec_string(x.at(i, j).c[k]);
                    return false;
                }
    return true;
}

}  // namespace

unsigned FilteredPhiModule::weight_sum() const {
    unsigned s = 0;
    for (unsigned r : weights) s += r;
    return s;
}

FilteredPhiModule FilteredPhiModule::make(u64 p, std::vector<unsigned> weights, ConstMatrix a) {
    if (p < 3 || !is_prime_u64(p)) throw InputError("p must be an odd prime");
    if (weights.empty()) throw InputError("weight list is empty");
    if (!std::is_sorted(weights.begin(), weights.end()))
        throw InputError("weights must be ascending");
    if (weights.back() > p - 2)
        throw InputError("top weight " + std::to_string(weights.back()) +
                         " exceeds p - 2 = " + std::to_string(p - 2));
    if (a.dim != weights.size()) throw InputError("matrix dimension does not match weights");
    if (a.ring.p != p) throw InputError("matrix ring has a different prime");
    if (const_det(a) % p == 0) throw InputError("det(A) is not a unit mod p");
    FilteredPhiModule fm;
    fm.p = p;
    fm.dim = a.dim;
    fm.weights = std::move(weights);
    fm.a = std::move(a);
    return fm;
}

SeriesMatrix build_P(const FilteredPhiModule& fm, const ZpRing& ring, unsigned mlen) {
    if (fm.p != ring.p) throw InputError("module prime and ring prime differ");
    if (mlen <= fm.p - 1) throw TruncationTooShortError("build needs M > p - 1");
    Series qmu = series_mul(elem_q(ring, mlen, 1), elem_mu(ring, mlen));
    ConstMatrix a_n = fm.a;
    for (auto& v : a_n.a) v %= ring.modulus;
    a_n.ring = ring;
    SeriesMatrix p_mat = SeriesMatrix::zero(ring, mlen, fm.dim);
    for (unsigned i = 0; i < fm.dim; ++i) {
        Series di = series_pow(qmu, fm.weights[i]);
        for (unsigned j = 0; j < fm.dim; ++j)
            p_mat.at(i, j) = series_scalar_mul(di, a_n.at(i, j));
    }
    // P = Diag(p^{r_i}) * A mod pi^{p-1}.
    SeriesMatrix expect = SeriesMatrix::zero(ring, mlen, fm.dim);
    for (unsigned i = 0; i < fm.dim; ++i) {
        u128 pr = ring.pow(fm.p % ring.modulus, fm.weights[i]);
        for (unsigned j = 0; j < fm.dim; ++j)
            expect.at(i, j) = Series::constant(ring, mlen, ring.mul(pr, a_n.at(i, j)));
    }
    std::string where;
    if (!low_coeffs_vanish(mat_sub(p_mat, expect), (unsigned)fm.p - 1, &where))
        throw IntegralityViolationError("P deviates from Diag(p^r)A below pi^{p-1}: " + where);
    return p_mat;
}

SeriesMatrix solve_gamma(const FilteredPhiModule& fm, const SeriesMatrix& p_mat,
                         const GammaValue& c) {
    const ZpRing& ring = p_mat.ring();
    const unsigned mlen = p_mat.mlen();
    const unsigned d = fm.dim;
    const unsigned shift = (unsigned)fm.p - 1;
    const Substitution sub_phi = Substitution::frobenius(ring, mlen);
    const Substitution sub_gam = Substitution::gamma(c, ring, mlen);

    ConstMatrix a_n = fm.a;
    for (auto& v : a_n.a) v %= ring.modulus;
    a_n.ring = ring;
    const ConstMatrix a_inv = const_inv(a_n);

    const Series q = elem_q(ring, mlen, 1);
    const Series mu = elem_mu(ring, mlen);
    const Series u_c = gamma_pi_unit(c, ring, mlen);
    const Series u_gamma = series_mul(sub_phi.apply(u_c), series_invert(u_c));
    const Series gmu = sub_gam.apply(mu);
    const Series base_w = series_invert(series_mul(u_gamma, gmu));  // (u_gamma*gamma(mu))^{-1}

    // t_i = (u_gamma*gamma(mu))^{-r_i} * mu^{r_i} = gamma((q mu)^{r_i})^{-1} (q mu)^{r_i},
    // with the q-powers cancelled symbolically.
    std::vector<Series> t(d), w(d);
    for (unsigned i = 0; i < d; ++i) {
        w[i] = series_pow(base_w, fm.weights[i]);
        t[i] = series_mul(w[i], series_pow(mu, fm.weights[i]));
    }
    // Coherence of the cancelled form: gamma(P) * A^{-1} Diag(t) A = P.
    {
        SeriesMatrix tm = SeriesMatrix::zero(ring, mlen, d);
        for (unsigned i = 0; i < d; ++i) tm.at(i, i) = t[i];
        SeriesMatrix tfull = mat_mul(mat_mul(a_inv, tm), a_n);
        if (!(mat_mul(mat_apply(sub_gam, p_mat), tfull) == p_mat))
            throw IntegralityViolationError("diagonal cancellation does not reproduce P");
    }

    // E_{ij} = pi^{p-1} q^{(p-1)-r_i+r_j} w_i mu^{r_j}; exponent >= 1 since r <= p-2.
    std::vector<Series> mupow(d), qpow(2 * shift + 1, Series::constant(ring, mlen, 1));
    for (unsigned i = 0; i < d; ++i) mupow[i] = series_pow(mu, fm.weights[i]);
    for (unsigned e = 1; e < qpow.size(); ++e) qpow[e] = series_mul(qpow[e - 1], q);
    SeriesMatrix big_e = SeriesMatrix::zero(ring, mlen, d);
    const Series pi_shift = Series::pi_power(ring, mlen, shift);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j) {
            unsigned e = shift - fm.weights[i] + fm.weights[j];
            Series v = series_mul(qpow[e], series_mul(w[i], mupow[j]));
            big_e.at(i, j) = series_mul(pi_shift, v);
        }

    SeriesMatrix h = SeriesMatrix::identity(ring, mlen, d);
    const unsigned cap = ring.prec * mlen + 16;
    for (unsigned it = 0; it < cap; ++it) {
        // Q = (H - Id) / pi^{p-1}, exact; the discarded tail of Q never
        // reaches pi^M because E carries pi^{p-1}.
        SeriesMatrix hmid = h;
        for (unsigned i = 0; i < d; ++i)
            hmid.at(i, i).c[0] = ring.sub(hmid.at(i, i).c[0], 1 % ring.modulus);
        std::string where;
        if (!low_coeffs_vanish(hmid, shift, &where))
            throw IntegralityViolationError("iterate leaves Id + pi^{p-1}(...): " + where);
        SeriesMatrix qmat = hmid;
        for (auto& entry : qmat.e) entry = divide_exact(entry, PiPower{shift});
        SeriesMatrix phiq = mat_apply(sub_phi, qmat);
        SeriesMatrix inner = SeriesMatrix::zero(ring, mlen, d);
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = 0; j < d; ++j)
                inner.at(i, j) = series_mul(big_e.at(i, j), phiq.at(i, j));
        for (unsigned i = 0; i < d; ++i)
            inner.at(i, i) = series_add(inner.at(i, i), t[i]);
        SeriesMatrix next = mat_mul(mat_mul(a_inv, inner), a_n);
        if (next == h) return h;
        h = std::move(next);
    }
    throw NoConvergenceError("fixed-point iteration did not stabilize within " +
                             std::to_string(cap) + " passes");
}

WachModule build_wach(const FilteredPhiModule& fm, unsigned prec, unsigned mlen,
                      const std::vector<GammaValue>& gens) {
    if (gens.empty()) throw InputError("no gamma generators given");
    WachModule w;
    w.fm = fm;
    w.ring = ZpRing::make(fm.p, prec);
    w.mlen = mlen;
    w.p_mat = build_P(fm, w.ring, mlen);
    w.gens = gens;
    const Substitution sub_phi = Substitution::frobenius(w.ring, mlen);
    for (const GammaValue& c : gens) {
        SeriesMatrix g = solve_gamma(fm, w.p_mat, c);
        const Substitution sub_gam = Substitution::gamma(c, w.ring, mlen);
        if (!(mat_mul(mat_apply(sub_phi, g), w.p_mat) ==
              mat_mul(mat_apply(sub_gam, w.p_mat), g)))
            throw IntegralityViolationError("phi(G)P != gamma(P)G for generator " + c.label());
        SeriesMatrix gm = g;
        for (unsigned i = 0; i < g.dim; ++i)
            gm.at(i, i).c[0] = w.ring.sub(gm.at(i, i).c[0], 1 % w.ring.modulus);
        std::string where;
        if (!low_coeffs_vanish(gm, (unsigned)fm.p - 1, &where))
            throw IntegralityViolationError("G - Id not divisible by pi^{p-1}: " + where);
        w.g_mats.push_back(std::move(g));
    }
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            const Substitution si = Substitution::gamma(gens[i], w.ring, mlen);
            const Substitution sj = Substitution::gamma(gens[j], w.ring, mlen);
            SeriesMatrix lhs = mat_mul(mat_apply(si, w.g_mats[j]), w.g_mats[i]);
            SeriesMatrix rhs = mat_mul(mat_apply(sj, w.g_mats[i]), w.g_mats[j]);
            if (!(lhs == rhs))
                throw CocycleViolationError("generators " + gens[i].label() + " and " +
                                            gens[j].label() + " do not commute as a cocycle");
        }
    return w;
}

HeightReport verify_heights(const WachModule& w) {
    HeightReport rep;
    rep.s = w.fm.weight_sum();
    const unsigned m = (unsigned)w.fm.p - 1;
    const unsigned rd = w.fm.top_weight();
    try {
        DetAdj da = det_adjugate(w.p_mat);
        ExactQuotient unit = divide_exact(da.det, QPower{1, rep.s});
        if (unit.certified_len == 0 || !w.ring.is_unit(unit.quotient.c[0]))
            throw NotAUnitError("det(P)/q^s is not a unit");
        Series uinv = series_invert(unit.quotient);
        // q^{r_d} P^{-1} = (adj(P) / q^{s - r_d}) * (det/q^s)^{-1}.
        SeriesMatrix cert = SeriesMatrix::zero(w.ring, w.mlen, w.fm.dim);
        unsigned window = w.mlen - rep.s * m;
        for (unsigned i = 0; i < w.fm.dim; ++i)
            for (unsigned j = 0; j < w.fm.dim; ++j) {
                ExactQuotient eq = divide_exact(da.adj.at(i, j), QPower{1, rep.s - rd});
                window = std::min(window, eq.certified_len);
                cert.at(i, j) = series_mul(eq.quotient, uinv);
            }
        window = std::min(window, unit.certified_len);
        for (auto& entry : cert.e)
            for (unsigned k = window; k < entry.mlen; ++k) entry.c[k] = 0;
        // P * cert = q^{r_d} Id through the certified window. The certificate
        // carries quotient noise pinned only on the p-precision staircase, so
        // a defect is a refutation only when it exceeds that staircase.
        SeriesMatrix prod = mat_mul(w.p_mat, cert);
        Series qrd = series_pow(elem_q(w.ring, w.mlen, 1), rd);
        for (unsigned i = 0; i < w.fm.dim && rep.evidence.empty(); ++i)
            for (unsigned j = 0; j < w.fm.dim && rep.evidence.empty(); ++j)
                for (unsigned k = 0; k < window; ++k) {
                    u128 want = (i == j) ? qrd.c[k] : 0;
                    u128 defect = w.ring.sub(prod.at(i, j).c[k], want);
                    if (defect == 0) continue;
                    unsigned prec = staircase_precision(w.ring, window, k, m);
                    if (w.ring.valuation(defect).value_or(w.ring.prec) < prec) {
                        rep.evidence = "P*Y mismatch at (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") pi^" + std::to_string(k);
                        break;
                    }
                }
        rep.certificate = std::move(cert);
        rep.certified_len = window;
        rep.pass = rep.evidence.empty() && is_integral(rep.certificate);
        if (!rep.pass && rep.evidence.empty()) rep.evidence = "certificate is not integral";
    } catch (const Error& e) {
        rep.pass = false;
        rep.evidence = e.what();
    }
    return rep;
}

FiltrationReport filtration_dims(const WachModule& w, unsigned level, unsigned mprime) {
    FiltrationReport rep;
    rep.level = level;
    const unsigned d = w.fm.dim;
    const unsigned m = (unsigned)w.fm.p - 1;
    rep.expected = (unsigned)std::count_if(w.fm.weights.begin(), w.fm.weights.end(),
                                           [&](unsigned r) { return r >= level; });
    if (level > w.fm.top_weight() + 1)
        throw UsageError("filtration level exceeds r_d + 1");
    if (mprime == 0) {
        unsigned budget = level * m + m;
        if (w.mlen <= budget) throw PrecisionExhaustedError("M too small for this level");
        mprime = w.mlen - budget;
    }
    if (mprime < 1 || mprime + level * m > w.mlen)
        throw PrecisionExhaustedError("working pi-order does not fit the division chain");

    const ZpRing& ring = w.ring;
    const Series phipi = frobenius(Series::pi_power(ring, w.mlen, 1));
    std::vector<Series> phipow(mprime, Series::constant(ring, w.mlen, 1));
    for (unsigned k = 1; k < mprime; ++k) phipow[k] = series_mul(phipow[k - 1], phipi);

    const unsigned cols = d * mprime;
    const unsigned rows_n = level * d * m;
    std::vector<std::vector<u128>> rows(rows_n, std::vector<u128>(cols, 0));
    for (unsigned j = 0; j < d; ++j)
        for (unsigned k = 0; k < mprime; ++k) {
            const unsigned col = j * mprime + k;
            // u = P * phi(pi^k e_j): column j of P times phi(pi)^k.
            for (unsigned i = 0; i < d; ++i) {
                Series cur = series_mul(w.p_mat.at(i, j), phipow[k]);
                for (unsigned t = 0; t < level; ++t) {
                    WeierstrassResult wr = weierstrass_divide(cur, 1);
                    for (unsigned x = 0; x < m; ++x)
                        rows[(t * d + i) * m + x][col] = wr.remainder[x];
                    cur = wr.quotient;
                }
            }
        }
    ZpKernel ker = zp_kernel(ring, rows, cols);
    // Project each kernel generator to its pi^0 coordinates and take the
    // mod-p rank of the projections.
    std::vector<std::vector<u64>> proj;
    for (const auto& b : ker.basis) {
        std::vector<u64> v(d, 0);
        bool nz = false;
        for (unsigned j = 0; j < d; ++j) {
            v[j] = (u64)(b[j * mprime] % w.fm.p);
            nz = nz || v[j] != 0;
        }
        if (nz) proj.push_back(std::move(v));
    }
    unsigned rank = 0;
    for (unsigned col = 0; col < d && rank < proj.size(); ++col) {
        unsigned piv = rank;
        while (piv < proj.size() && proj[piv][col] == 0) ++piv;
        if (piv == proj.size()) continue;
        std::swap(proj[rank], proj[piv]);
        u64 inv = 1, base = proj[rank][col], e = w.fm.p - 2;
        while (e) {
            if (e & 1) inv = inv * base % w.fm.p;
            base = base * base % w.fm.p;
            e >>= 1;
        }
        for (unsigned i = 0; i < proj.size(); ++i) {
            if (i == rank || proj[i][col] == 0) continue;
            u64 f = proj[i][col] * inv % w.fm.p;
            for (unsigned x = 0; x < d; ++x)
                proj[i][x] = (proj[i][x] + (w.fm.p - f) * proj[rank][x]) % w.fm.p;
        }
        ++rank;
    }
    rep.dim = rank;
    rep.pass = rep.dim == rep.expected;
    return rep;
}

DiagonalReport verify_diagonal(const WachModule& w, unsigned level, const GammaValue& c) {
    DiagonalReport rep;
    rep.level = level;
    std::size_t idx = w.gens.size();
    for (std::size_t i = 0; i < w.gens.size(); ++i)
        if (w.gens[i] == c) idx = i;
    if (idx == w.gens.size()) throw UsageError("value is not a stored generator");
    if (level > w.ring.prec) throw UsageError("level exceeds working precision");
    {
        Zp cn = c.realize(w.ring);
        u128 pn = 1;
        for (unsigned i = 0; i < level; ++i) pn *= w.fm.p;
        if (cn.residue() % pn != 1 % pn)
            throw UsageError("generator is not congruent to 1 mod p^" + std::to_string(level));
    }
    const unsigned d = w.fm.dim;
    unsigned nq = cyclo_precision(w.fm.p, w.ring.prec, w.mlen, level);
    rep.nq = nq;
    CycloRing cring = CycloRing::make(w.fm.p, level, nq);
    CycloMatrix red = CycloMatrix::identity(cring, d);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j)
            red.at(i, j) = reduce_mod_qn(w.g_mats[idx].at(i, j), level);
    std::vector<CycloElem> cp = char_poly(red);

    // Expected prod_j (X - c^{-r_j}) over Z/p^{nq}.
    const ZpRing& sr = cring.scalar_ring;
    Zp cq = c.realize(sr);
    std::vector<u128> expect(d + 1, 0);  // lowest degree first
    expect[0] = 1 % sr.modulus;
    unsigned deg = 0;
    for (unsigned j = 0; j < d; ++j) {
        u128 root = sr.invert(sr.pow(cq.residue(), w.fm.weights[j]));
        for (unsigned k = deg + 2; k-- > 0;) {
            u128 keep = (k > 0) ? expect[k - 1] : 0;
            expect[k] = sr.sub(keep, sr.mul(root, expect[k]));
        }
        ++deg;
    }

    rep.pass = true;
    for (unsigned k = 0; k <= d; ++k) {
        rep.char_coeffs.push_back(cp[k].str());
        rep.expected_coeffs.push_back(dec_string(expect[k]));
        if (!is_scalar(cp[k])) {
            rep.pass = false;
            if (rep.evidence.empty())
                rep.evidence = "char-poly coefficient " + std::to_string(k) + " is not scalar";
        } else if (cp[k].c[0] != expect[k]) {
            rep.pass = false;
            if (rep.evidence.empty())
                rep.evidence = "coefficient " + std::to_string(k) + ": " + dec_string(cp[k].c[0]) +
                               " != " + dec_string(expect[k]);
        }
    }
    return rep;
}

bool congruence_hypothesis_met(u64 p, unsigned level, unsigned top_weight) {
    if (level < 1) return false;
    u128 v = p - 1;
    for (unsigned i = 1; i < level; ++i) {
        v *= p;
        if (v > (u128)1 << 40) return true;
    }
    return v >= (u128)top_weight + 1;
}

CongruenceReport congruence_check(const WachModule& w1, const WachModule& w2, unsigned level) {
    CongruenceReport rep;
    rep.level = level;
    if (w1.fm.p != w2.fm.p || w1.fm.weights != w2.fm.weights || !(w1.gens == w2.gens))
        throw UsageError("builds are not comparable (prime, weights or generators differ)");
    if (w1.mlen != w2.mlen) throw UsageError("builds use different pi-truncations");
    if (level > w1.ring.prec || level > w2.ring.prec)
        throw UsageError("congruence level exceeds a build's precision");
    if (!congruence_hypothesis_met(w1.fm.p, level, w1.fm.top_weight())) {
        rep.refused = true;
        rep.evidence = "p^{n-1}(p-1) < r_d + 1: comparison refused";
        return rep;
    }
    u128 pn = 1;
    for (unsigned i = 0; i < level; ++i) pn *= w1.fm.p;
    auto compare = [&](const SeriesMatrix& x, const SeriesMatrix& y, const std::string& tag) {
        for (unsigned i = 0; i < x.dim; ++i)
            for (unsigned j = 0; j < x.dim; ++j)
                for (unsigned k = 0; k < x.mlen(); ++k) {
                    if (x.at(i, j).c[k] % pn != y.at(i, j).c[k] % pn) {
                        rep.evidence = tag + " entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") pi^" + std::to_string(k) + ": " +
                                       dec_string(x.at(i, j).c[k] % pn) + " != " +
                                       dec_string(y.at(i, j).c[k] % pn);
                        return false;
                    }
                }
        return true;
    };
    rep.pass = compare(w1.p_mat, w2.p_mat, "P");
    for (std::size_t g = 0; rep.pass && g < w1.g_mats.size(); ++g)
        rep.pass = compare(w1.g_mats[g], w2.g_mats[g], "G[" + w1.gens[g].label() + "]");
    return rep;
}

StabilityReport precision_stability(const WachModule& w, unsigned n1) {
    StabilityReport rep;
    if (n1 < 1 || n1 >= w.ring.prec)
        throw UsageError("comparison precision must satisfy 1 <= n1 < N");
    ZpRing low = ZpRing::make(w.fm.p, n1);
    ConstMatrix a_low = w.fm.a;
    for (auto& v : a_low.a) v %= low.modulus;
    a_low.ring = low;
    FilteredPhiModule fm_low = FilteredPhiModule::make(w.fm.p, w.fm.weights, a_low);
    WachModule rebuilt = build_wach(fm_low, n1, w.mlen, w.gens);
    auto compare = [&](const SeriesMatrix& full, const SeriesMatrix& small,
                       const std::string& tag) {
        for (unsigned i = 0; i < full.dim; ++i)
            for (unsigned j = 0; j < full.dim; ++j)
                for (unsigned k = 0; k < full.mlen(); ++k)
                    if (full.at(i, j).c[k] % low.modulus != small.at(i, j).c[k]) {
                        rep.evidence = tag + " entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") pi^" + std::to_string(k) +
                                       " differs after truncation";
                        return false;
                    }
        return true;
    };
    rep.pass = compare(w.p_mat, rebuilt.p_mat, "P");
    for (std::size_t g = 0; rep.pass && g < w.g_mats.size(); ++g)
        rep.pass = compare(w.g_mats[g], rebuilt.g_mats[g], "G[" + w.gens[g].label() + "]");
    return rep;
}

}  // namespace wach

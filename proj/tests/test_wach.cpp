#include <doctest.h>

#include "wach/wach.hpp"

using namespace wach;

namespace {

Series lit(const ZpRing& ring, unsigned mlen, std::vector<long long> coeffs,
           unsigned denom = 0) {
    std::vector<u128> c;
    for (long long v : coeffs) c.push_back(ring.reduce_int(v));
    return Series::from_coeffs(ring, mlen, std::move(c), denom);
}

FilteredPhiModule module(u64 p, unsigned prec, std::vector<unsigned> weights,
                         std::vector<std::vector<long long>> rows) {
    ZpRing ring = ZpRing::make(p, prec);
    std::vector<std::vector<u128>> a;
    for (auto& row : rows) {
        std::vector<u128> r;
        for (long long v : row) r.push_back(ring.reduce_int(v));
        a.push_back(std::move(r));
    }
    return FilteredPhiModule::make(p, std::move(weights), ConstMatrix::from_rows(ring, a));
}

}  // namespace

TEST_CASE("module input validation") {
    CHECK_THROWS_AS(module(2, 2, {0}, {{1}}), InputError);   // p = 2
    CHECK_THROWS_AS(module(9, 2, {0}, {{1}}), InputError);   // not prime
    CHECK_THROWS_AS(module(3, 2, {2}, {{1}}), InputError);   // r_d > p-2
    CHECK_THROWS_AS(module(3, 2, {1, 0}, {{1, 0}, {0, 1}}), InputError);  // not ascending
    CHECK_THROWS_AS(module(3, 2, {0}, {{3}}), InputError);   // det not a unit
    CHECK_THROWS_AS(module(3, 2, {0, 0}, {{1}}), InputError);  // dim mismatch
    CHECK_NOTHROW(module(5, 2, {0, 1, 3}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
}

TEST_CASE("twist matrix construction") {
    FilteredPhiModule fm = module(3, 4, {1}, {{1}});
    ZpRing ring = ZpRing::make(3, 4);
    SeriesMatrix p_mat = build_P(fm, ring, 8);
    CHECK(p_mat.at(0, 0) == lit(ring, 8, {3, 0, 1, -1, 1, -1, 1, -1}));
    CHECK_THROWS_AS(build_P(fm, ring, 2), TruncationTooShortError);
}

TEST_CASE("trivial module has identity cocycle") {
    FilteredPhiModule fm = module(3, 4, {0}, {{1}});
    WachModule w = build_wach(fm, 4, 12, default_gamma_generators(3));
    for (const auto& g : w.g_mats)
        CHECK(g == SeriesMatrix::identity(w.ring, 12, 1));
}

TEST_CASE("fixed point solves the commutation equation exactly") {
    for (u64 p : {3ULL, 5ULL}) {
        unsigned mlen = 4 * (unsigned)(p - 1) + 8;
        FilteredPhiModule fm =
            p == 3 ? module(3, 4, {0, 1}, {{1, 1}, {1, 2}})
                   : module(5, 4, {1, 3}, {{2, 1}, {0, 1}});
        WachModule w = build_wach(fm, 4, mlen, default_gamma_generators(p));
        const Substitution phi = Substitution::frobenius(w.ring, mlen);
        for (std::size_t i = 0; i < w.gens.size(); ++i) {
            const Substitution gam = Substitution::gamma(w.gens[i], w.ring, mlen);
            SeriesMatrix lhs = mat_mul(mat_apply(phi, w.g_mats[i]), w.p_mat);
            SeriesMatrix rhs = mat_mul(mat_apply(gam, w.p_mat), w.g_mats[i]);
            CHECK(lhs == rhs);
            // G = Id mod pi^{p-1}
            SeriesMatrix dev =
                mat_sub(w.g_mats[i], SeriesMatrix::identity(w.ring, mlen, fm.dim));
            for (unsigned a = 0; a < fm.dim; ++a)
                for (unsigned b = 0; b < fm.dim; ++b)
                    for (unsigned k = 0; k < (unsigned)p - 1; ++k)
                        CHECK(dev.at(a, b).c[k] == 0);
        }
        // pairwise cocycle compatibility
        const Substitution g0 = Substitution::gamma(w.gens[0], w.ring, mlen);
        const Substitution g1 = Substitution::gamma(w.gens[1], w.ring, mlen);
        CHECK(mat_mul(mat_apply(g0, w.g_mats[1]), w.g_mats[0]) ==
              mat_mul(mat_apply(g1, w.g_mats[0]), w.g_mats[1]));
    }
}

TEST_CASE("height certificate") {
    FilteredPhiModule fm = module(3, 4, {1}, {{1}});
    WachModule w = build_wach(fm, 4, 12, default_gamma_generators(3));
    HeightReport h = verify_heights(w);
    CHECK(h.pass);
    CHECK(h.s == 1);
    CHECK(h.certified_len == 12 - 2);
    // The certificate is pinned only mod p: q * P^{-1} = mu^{-1} = 1 + pi as
    // power series, and the stored witness may differ by p-divisible
    // annihilators of q. Mod p it must be exactly 1 + pi.
    CHECK(h.certificate.at(0, 0).c[0] % 3 == 1);
    CHECK(h.certificate.at(0, 0).c[1] % 3 == 1);
    for (unsigned k = 2; k < h.certified_len; ++k)
        CHECK(h.certificate.at(0, 0).c[k] % 3 == 0);
    for (unsigned k = h.certified_len; k < 12; ++k) CHECK(h.certificate.at(0, 0).c[k] == 0);
    // P * cert = q^{r_d} Id, recomputed here from the parts.
    Series prod = series_mul(w.p_mat.at(0, 0), h.certificate.at(0, 0));
    Series q = elem_q(w.ring, 12, 1);
    for (unsigned k = 0; k < h.certified_len; ++k) CHECK(prod.c[k] == q.c[k]);
}

TEST_CASE("height certificate for a weight-zero block") {
    FilteredPhiModule fm = module(3, 4, {0, 1}, {{2, 1}, {1, 1}});
    WachModule w = build_wach(fm, 4, 14, default_gamma_generators(3));
    HeightReport h = verify_heights(w);
    CHECK(h.pass);
    CHECK(h.s == 1);
}

TEST_CASE("filtration dimensions match the weight multiset") {
    // weights (0, 2) at p = 5: dims 2, 1, 1, 0 for i = 0..3.
    FilteredPhiModule fm = module(5, 4, {0, 2}, {{1, 2}, {1, 1}});
    unsigned mlen = 6 * 4 + 8;
    WachModule w = build_wach(fm, 4, mlen, default_gamma_generators(5));
    unsigned want[] = {2, 1, 1, 0};
    for (unsigned i = 0; i <= 3; ++i) {
        FiltrationReport f = filtration_dims(w, i);
        CHECK(f.pass);
        CHECK(f.level == i);
        CHECK(f.expected == want[i]);
        CHECK(f.dim == want[i]);
    }
    CHECK_THROWS_AS(filtration_dims(w, 4), UsageError);
}

TEST_CASE("diagonal action at level one") {
    FilteredPhiModule fm = module(3, 4, {1}, {{1}});
    WachModule w = build_wach(fm, 4, 14, default_gamma_generators(3));
    DiagonalReport d = verify_diagonal(w, 1, GammaValue::integer("4"));
    CHECK(d.pass);
    CHECK(d.level == 1);
    CHECK(d.nq == 4);
    REQUIRE(d.char_coeffs.size() == 2);
    // X - 4^{-1} mod 3^4: 4 * 61 = 244 = 243 + 1.
    ZpRing nqring = ZpRing::make(3, d.nq);
    CHECK(d.char_coeffs[0] == dec_string(nqring.neg(nqring.invert(4))));
    CHECK(d.char_coeffs == d.expected_coeffs);
}

TEST_CASE("diagonal action for two distinct weights") {
    FilteredPhiModule fm = module(5, 4, {0, 1}, {{1, 1}, {3, 4}});
    unsigned mlen = 3 * 4 + 8;
    WachModule w = build_wach(fm, 4, mlen, default_gamma_generators(5));
    DiagonalReport d = verify_diagonal(w, 1, GammaValue::integer("6"));
    CHECK(d.pass);
    REQUIRE(d.char_coeffs.size() == 3);
    // (X - 1)(X - 6^{-1}) = 6^{-1} - (1 + 6^{-1}) X + X^2
    ZpRing nr = ZpRing::make(5, d.nq);
    u128 inv6 = nr.invert(6);
    CHECK(d.char_coeffs[0] == dec_string(inv6));
    CHECK(d.char_coeffs[1] == dec_string(nr.neg(nr.add(1, inv6))));
    CHECK(d.char_coeffs[2] == "1");
}

TEST_CASE("diagonal action at level two") {
    FilteredPhiModule fm = module(3, 4, {1}, {{1}});
    unsigned mlen = 3 * 6 + 8;
    std::vector<GammaValue> gens = default_gamma_generators(3);
    gens.push_back(GammaValue::integer("64"));  // (1+3)^3, generator below level 2
    WachModule w = build_wach(fm, 4, mlen, gens);
    DiagonalReport d = verify_diagonal(w, 2, GammaValue::integer("64"));
    CHECK(d.pass);
    CHECK(d.nq == 2);
    // c = 64 is only 1 mod 9, so at level 2 the eigenvalue 64^{-1} is visible
    // exactly when nq reaches 2: 64^{-1} = 34 mod 81, = 7 mod 9.
    ZpRing nr = ZpRing::make(3, d.nq);
    CHECK(d.char_coeffs[0] == dec_string(nr.neg(nr.invert(64 % nr.modulus))));
    CHECK_THROWS_AS(verify_diagonal(w, 2, GammaValue::integer("4")), UsageError);
}

TEST_CASE("congruent inputs give congruent modules") {
    auto gens = default_gamma_generators(5);
    unsigned mlen = 24;
    FilteredPhiModule a1 = module(5, 4, {0, 1}, {{1, 2}, {3, 4}});
    WachModule w1 = build_wach(a1, 4, mlen, gens);
    for (unsigned n = 1; n <= 2; ++n) {
        long long pn = n == 1 ? 5 : 25;
        FilteredPhiModule a2 =
            module(5, 4, {0, 1}, {{1 + pn, 2 + pn}, {3, 4 + pn}});
        WachModule w2 = build_wach(a2, 4, mlen, gens);
        CongruenceReport cr = congruence_check(w1, w2, n);
        CHECK(cr.pass);
        CHECK(!cr.refused);
        CHECK(cr.level == n);
        if (n == 1) {
            // Deeper congruence than the inputs support must fail honestly.
            CongruenceReport bad = congruence_check(w1, w2, 2);
            CHECK(!bad.pass);
            CHECK(!bad.refused);
            CHECK(!bad.evidence.empty());
        }
    }
    // frame mismatches are usage errors
    WachModule wother = build_wach(a1, 4, 20, gens);
    CHECK_THROWS_AS(congruence_check(w1, wother, 1), UsageError);
}

TEST_CASE("congruence hypothesis guard") {
    CHECK(congruence_hypothesis_met(3, 1, 1));
    CHECK(congruence_hypothesis_met(5, 1, 3));
    CHECK(!congruence_hypothesis_met(3, 1, 5));
    CHECK(congruence_hypothesis_met(3, 3, 5));
    CHECK(congruence_hypothesis_met(13, 6, 11));  // large tower, early true
}

TEST_CASE("precision stability under truncation") {
    FilteredPhiModule fm = module(3, 5, {1}, {{1}});
    WachModule w = build_wach(fm, 5, 12, default_gamma_generators(3));
    StabilityReport s = precision_stability(w, 3);
    CHECK(s.pass);
    FilteredPhiModule fm2 = module(5, 6, {0, 2}, {{1, 2}, {1, 1}});
    WachModule w2 = build_wach(fm2, 6, 24, default_gamma_generators(5));
    StabilityReport s2 = precision_stability(w2, 4);
    CHECK(s2.pass);
    CHECK_THROWS_AS(precision_stability(w, 5), UsageError);
    CHECK_THROWS_AS(precision_stability(w, 0), UsageError);
}

// Acceptance gate: one line per criterion, exit 0 only if all pass.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wach/selfcheck.hpp"
#include "wach/wach.hpp"

using namespace wach;

namespace {

struct Gate {
    int failures = 0;

    void item(int number, const std::string& name, bool ok, double ms) {
        std::printf("%s  %2d  %-28s  (%.2f s)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                    ms / 1000.0);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

template <typename F>
bool guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        std::printf("      exception: %s\n", e.what());
        return false;
    }
}

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

Series random_series(const ZpRing& ring, unsigned mlen, std::mt19937_64& rng) {
    std::vector<u128> c(mlen);
    for (auto& v : c) v = ((u128)rng() << 64 | rng()) % ring.modulus;
    return Series::from_coeffs(ring, mlen, std::move(c));
}

ConstMatrix random_unit_matrix(const ZpRing& ring, unsigned dim, std::mt19937_64& rng) {
    while (true) {
        std::vector<std::vector<u128>> rows(dim, std::vector<u128>(dim));
        for (auto& row : rows)
            for (auto& v : row) v = rng() % ring.modulus;
        ConstMatrix a = ConstMatrix::from_rows(ring, rows);
        if (const_det(a) % ring.p != 0) return a;
    }
}

// Weight lists exercised for every prime; entries above p-2 are clipped out
// by the caller.
std::vector<std::vector<unsigned>> fixed_weight_cases(u64 p) {
    std::vector<std::vector<unsigned>> all = {
        {0},       {1},       {(unsigned)p - 2}, {0, 0},    {0, 1},    {1, 1},
        {0, 2},    {1, 2},    {0, 0, 0},         {0, 0, 1}, {0, 1, 1}, {0, 1, 2},
    };
    std::vector<std::vector<unsigned>> keep;
    for (auto& w : all)
        if (w.back() <= p - 2) keep.push_back(w);
    return keep;
}

struct Case {
    std::vector<unsigned> weights;
    ConstMatrix a;
};

std::vector<Case> item4_cases(u64 p, unsigned prec, u64 seed) {
    ZpRing ring = ZpRing::make(p, prec);
    std::mt19937_64 rng(seed);
    std::vector<Case> cases;
    const auto weight_lists = fixed_weight_cases(p);
    for (const auto& w : weight_lists)
        cases.push_back({w, random_unit_matrix(ring, w.size(), rng)});
    // 20 more draws: fresh random unit A over the same fixed weight lists.
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& w = weight_lists[i % weight_lists.size()];
        cases.push_back({w, random_unit_matrix(ring, w.size(), rng)});
    }
    return cases;
}

bool check_built_invariants(const WachModule& w) {
    const Substitution phi = Substitution::frobenius(w.ring, w.mlen);
    for (std::size_t i = 0; i < w.gens.size(); ++i) {
        const Substitution gam = Substitution::gamma(w.gens[i], w.ring, w.mlen);
        if (!(mat_mul(mat_apply(phi, w.g_mats[i]), w.p_mat) ==
              mat_mul(mat_apply(gam, w.p_mat), w.g_mats[i])))
            return false;
        for (unsigned a = 0; a < w.fm.dim; ++a)
            for (unsigned b = 0; b < w.fm.dim; ++b)
                for (unsigned k = 0; k < (unsigned)w.fm.p - 1; ++k) {
                    u128 want = (a == b && k == 0) ? 1 : 0;
                    if (w.g_mats[i].at(a, b).c[k] != want) return false;
                }
    }
    for (std::size_t i = 0; i < w.gens.size(); ++i)
        for (std::size_t j = i + 1; j < w.gens.size(); ++j) {
            const Substitution gi = Substitution::gamma(w.gens[i], w.ring, w.mlen);
            const Substitution gj = Substitution::gamma(w.gens[j], w.ring, w.mlen);
            if (!(mat_mul(mat_apply(gi, w.g_mats[j]), w.g_mats[i]) ==
                  mat_mul(mat_apply(gj, w.g_mats[i]), w.g_mats[j])))
                return false;
        }
    return true;
}

u128 pow_u128(u128 b, unsigned e) {
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

// 1: substitution operators commute and compose.
bool operator_laws() {
    for (u64 p : {3, 5, 7}) {
        ZpRing ring = ZpRing::make(p, 6);
        unsigned mlen = 24;
        const Substitution phi = Substitution::frobenius(ring, mlen);
        std::mt19937_64 rng(1000 + p);
        for (int pair = 0; pair < 10; ++pair) {
            u64 c1 = 1 + rng() % 100000, c2 = 1 + rng() % 100000;
            while (c1 % p == 0) ++c1;
            while (c2 % p == 0) ++c2;
            GammaValue g1 = GammaValue::integer(dec_string(c1));
            GammaValue g2 = GammaValue::integer(dec_string(c2));
            GammaValue g12 = GammaValue::integer(dec_string((u128)c1 * c2));
            const Substitution s1 = Substitution::gamma(g1, ring, mlen);
            const Substitution s2 = Substitution::gamma(g2, ring, mlen);
            const Substitution s12 = Substitution::gamma(g12, ring, mlen);
            for (int round = 0; round < 20; ++round) {
                Series f = random_series(ring, mlen, rng);
                if (!(s1.apply(phi.apply(f)) == phi.apply(s1.apply(f)))) return false;
                if (!(s1.apply(s2.apply(f)) == s12.apply(f))) return false;
            }
        }
    }
    return true;
}

// 2: mu * q = p to first order and in all powers up to p-2.
bool mu_q_identities() {
    for (u64 p : {3, 5, 7, 11}) {
        ZpRing ring = ZpRing::make(p, 6);
        unsigned mlen = 3 * (unsigned)(p - 1) + 4;
        Series mu = elem_mu(ring, mlen);
        Series q = elem_q(ring, mlen, 1);
        if (mu.c[0] != 1) return false;
        Series prod =
            series_mul(mu, series_sub(q, Series::pi_power(ring, mlen, (unsigned)p - 1)));
        if (!(prod == Series::constant(ring, mlen, p))) return false;
        Series mq = series_mul(mu, q);
        Series acc = Series::constant(ring, mlen, 1);
        for (unsigned s = 1; s + 1 <= p - 1; ++s) {
            acc = series_mul(acc, mq);
            u128 ps = pow_u128(p, s) % ring.modulus;
            for (unsigned k = 0; k < (unsigned)p - 1; ++k)
                if (acc.c[k] != (k == 0 ? ps : 0)) return false;
        }
    }
    return true;
}

// 3: truncated t-decomposition agrees with log(1+pi) to the reported digits.
bool t_decomposition() {
    ZpRing ring = ZpRing::make(3, 8);
    unsigned mlen = 18;
    TProduct t = t_product(ring, mlen, 6);
    if (t.guarantee == 0) return false;
    Series lg = log_one_plus_pi(ring, mlen);
    Series diff = series_sub(t.value, lg);
    u128 bound = pow_u128(3, t.guarantee + diff.denom);
    for (u128 v : diff.c)
        if (v % bound != 0) return false;
    return true;
}

int main() {
    Gate gate;
    double t0;

    auto timed = [&](int number, const char* name, auto&& body) {
        t0 = now_ms();
        bool ok = guarded(body);
        gate.item(number, name, ok, now_ms() - t0);
    };

    timed(1, "operator laws", [] { return operator_laws(); });
    timed(2, "mu-q identities", [] { return mu_q_identities(); });
    timed(3, "t decomposition", [] { return t_decomposition(); });

    // 4 + 5: construction invariants and height certificates on shared cases.
    bool built_ok = true, heights_ok = true;
    t0 = now_ms();
    built_ok = guarded([&] {
        bool ok = true;
        for (u64 p : {3, 5, 7}) {
            unsigned mlen = 4 * (unsigned)(p - 1) + 8;
            auto gens = default_gamma_generators(p);
            for (const auto& c : item4_cases(p, 4, 40 + p)) {
                FilteredPhiModule fm = FilteredPhiModule::make(p, c.weights, c.a);
                WachModule w = build_wach(fm, 4, mlen, gens);
                ok = ok && check_built_invariants(w);
                HeightReport h = verify_heights(w);
                heights_ok = heights_ok && h.pass;
            }
        }
        return ok;
    });
    gate.item(4, "construction soundness", built_ok, now_ms() - t0);
    gate.item(5, "height bound", built_ok && heights_ok, 0.0);

    // 6: filtration dimensions at enlarged M.
    timed(6, "filtration recovery", [&] {
        for (u64 p : {3, 5, 7}) {
            unsigned mlen = 6 * (unsigned)(p - 1) + 8;
            auto gens = default_gamma_generators(p);
            for (const auto& c : item4_cases(p, 4, 40 + p)) {
                if (c.weights.size() > 2) continue;
                FilteredPhiModule fm = FilteredPhiModule::make(p, c.weights, c.a);
                WachModule w = build_wach(fm, 4, mlen, gens);
                for (unsigned i = 0; i <= fm.top_weight() + 1; ++i)
                    if (!filtration_dims(w, i).pass) return false;
            }
        }
        return true;
    });

    // 7: diagonal action modulo phi^{n-1}(q) at levels 1 and 2.
    timed(7, "diagonal action", [] {
        for (u64 p : {3, 5, 7}) {
            ZpRing ring = ZpRing::make(p, 4);
            std::mt19937_64 rng(70 + p);
            for (unsigned level = 1; level <= 2; ++level) {
                unsigned m = distinguished_degree(p, level);
                unsigned mlen = 3 * m + 8;
                u128 cval = pow_u128(p + 1, level == 1 ? 1 : (unsigned)p);
                GammaValue c = GammaValue::integer(dec_string(cval));
                std::vector<GammaValue> gens = default_gamma_generators(p);
                if (level == 2) gens.push_back(c);
                std::vector<std::vector<unsigned>> cases =
                    level == 1 ? std::vector<std::vector<unsigned>>{{0},
                                                                    {1},
                                                                    {(unsigned)p - 2},
                                                                    {0, 1},
                                                                    {1, 1}}
                               : std::vector<std::vector<unsigned>>{{1}, {0, 1}};
                for (const auto& weights : cases) {
                    FilteredPhiModule fm = FilteredPhiModule::make(
                        p, weights, random_unit_matrix(ring, weights.size(), rng));
                    WachModule w = build_wach(fm, 4, mlen, gens);
                    if (!verify_diagonal(w, level, c).pass) return false;
                }
            }
        }
        return true;
    });

    // 8: congruent inputs produce congruent modules.
    timed(8, "input congruence", [] {
        u64 p = 5;
        unsigned mlen = 24;
        ZpRing ring = ZpRing::make(p, 4);
        auto gens = default_gamma_generators(p);
        std::mt19937_64 rng(88);
        for (int round = 0; round < 10; ++round) {
            unsigned d = 1 + rng() % 2;
            std::vector<unsigned> weights(d);
            for (auto& v : weights) v = rng() % 4;  // r_d <= 3
            std::sort(weights.begin(), weights.end());
            unsigned n = 1 + rng() % 3;
            ConstMatrix a1 = random_unit_matrix(ring, d, rng);
            ConstMatrix a2 = a1;
            u128 pn = pow_u128(p, n);
            for (auto& v : a2.a) v = ring.add(v, ring.mul(pn, rng() % ring.modulus));
            WachModule w1 = build_wach(FilteredPhiModule::make(p, weights, a1), 4, mlen, gens);
            WachModule w2 = build_wach(FilteredPhiModule::make(p, weights, a2), 4, mlen, gens);
            CongruenceReport cr = congruence_check(w1, w2, n);
            if (!cr.pass || cr.refused) return false;
        }
        return true;
    });

    // 9: builds at N and N + 2 agree after truncation (d <= 2 cases of item 4,
    // input matrices lifted canonically to the larger precision).
    timed(9, "precision stability", [&] {
        for (u64 p : {3, 5, 7}) {
            unsigned mlen = 4 * (unsigned)(p - 1) + 8;
            auto gens = default_gamma_generators(p);
            ZpRing ring6 = ZpRing::make(p, 6);
            for (const auto& c : item4_cases(p, 4, 40 + p)) {
                if (c.weights.size() > 2) continue;
                ConstMatrix lifted = c.a;
                lifted.ring = ring6;
                FilteredPhiModule fm = FilteredPhiModule::make(p, c.weights, lifted);
                WachModule w = build_wach(fm, 6, mlen, gens);
                if (!precision_stability(w, 4).pass) return false;
            }
        }
        return true;
    });

    // 10: algorithm-vs-oracle equivalences.
    timed(10, "oracle equivalences", [] {
        auto smith = selfcheck::smith_minor_gcd(5, 8, 3, 100, 101);
        auto berk = selfcheck::berkowitz_vs_cofactor(5, 1, 2, 3, 50, 102);
        auto recon = selfcheck::weierstrass_reconstruction(5, 4, 18, 100, 103);
        if (!smith.pass()) std::printf("      %s\n", smith.first_failure.c_str());
        if (!berk.pass()) std::printf("      %s\n", berk.first_failure.c_str());
        if (!recon.pass()) std::printf("      %s\n", recon.first_failure.c_str());
        return smith.pass() && berk.pass() && recon.pass();
    });

    if (gate.failures) std::printf("%d criteria failed\n", gate.failures);
    return gate.failures ? 1 : 0;
}

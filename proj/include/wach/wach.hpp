#pragma once

#include <string>
#include <vector>

#include "wach/cyclo.hpp"
#include "wach/linalg.hpp"
#include "wach/series.hpp"

namespace wach {

// Filtered input data: ascending weights 0 <= r_1 <= ... <= r_d <= p-2 and a
// constant matrix A with unit determinant mod p.
struct FilteredPhiModule {
    u64 p = 0;
    unsigned dim = 0;
    std::vector<unsigned> weights;
    ConstMatrix a;

    static FilteredPhiModule make(u64 p, std::vector<unsigned> weights, ConstMatrix a);
    unsigned top_weight() const { return weights.back(); }
    unsigned weight_sum() const;
};

// P = Diag((q mu)^{r_1}, ..., (q mu)^{r_d}) * A; asserts P = Diag(p^{r_j}) * A
// mod pi^{p-1}.
SeriesMatrix build_P(const FilteredPhiModule& fm, const ZpRing& ring, unsigned mlen);

// Fixed point G of H -> gamma_c(P)^{-1} phi(H) P on Id + pi^{p-1} M(d, A+),
// computed with the q-power denominators cancelled symbolically through the
// diagonal structure of P. Iterates until two successive iterates agree at
// full working precision; cap N*M + 16 then NoConvergence.
SeriesMatrix solve_gamma(const FilteredPhiModule& fm, const SeriesMatrix& p_mat,
                         const GammaValue& c);

struct WachModule {
    FilteredPhiModule fm;
    ZpRing ring;
    unsigned mlen = 0;
    SeriesMatrix p_mat;
    std::vector<GammaValue> gens;
    std::vector<SeriesMatrix> g_mats;  // one per generator
};

// Builds P and G_c for every generator, then asserts commutation
// phi(G_c) P = gamma_c(P) G_c, G_c = Id mod pi^{p-1}, and the pairwise
// cocycle compatibility gamma_c(G_{c'}) G_c = gamma_{c'}(G_c) G_{c'}.
WachModule build_wach(const FilteredPhiModule& fm, unsigned prec, unsigned mlen,
                      const std::vector<GammaValue>& gens);

struct HeightReport {
    bool pass = false;
    unsigned s = 0;              // sum of weights
    unsigned certified_len = 0;  // pi-window of the certificate
    SeriesMatrix certificate;    // q^{r_d} * P^{-1}, integral when pass
    std::string evidence;
};
// Certifies q^{r_d} P^{-1} integral via the structured inverse with s = sum r_j.
HeightReport verify_heights(const WachModule& w);

struct FiltrationReport {
    unsigned level = 0;  // i
    unsigned dim = 0;    // mod-p dimension of the pi^0-projection of solutions
    unsigned expected = 0;
    bool pass = false;
};
// Dimension of the degree-i filtration step: solutions v of "the first i
// Weierstrass remainders of P * phi(v) vanish", coefficients bounded by mprime.
// mprime = 0 selects the default M - i(p-1) - (p-1).
FiltrationReport filtration_dims(const WachModule& w, unsigned level, unsigned mprime = 0);

struct DiagonalReport {
    bool pass = false;
    unsigned level = 0;
    unsigned nq = 0;
    std::vector<std::string> char_coeffs;      // reduced char_poly(G_c mod phi^{n-1}(q))
    std::vector<std::string> expected_coeffs;  // prod (X - c^{-r_j})
    std::string evidence;
};
// Reduces G_c mod phi^{n-1}(q) and compares its characteristic polynomial with
// prod_j (X - c^{-r_j}); c must satisfy c = 1 mod p^n.
DiagonalReport verify_diagonal(const WachModule& w, unsigned level, const GammaValue& c);

bool congruence_hypothesis_met(u64 p, unsigned level, unsigned top_weight);

struct CongruenceReport {
    bool pass = false;
    bool refused = false;
    unsigned level = 0;
    std::string evidence;  // first failing entry/coefficient
};
// Entrywise comparison of P and every G_c mod p^n for two builds sharing
// weights and generators. Refused (HypothesisNotMet) if p^{n-1}(p-1) < r_d+1.
CongruenceReport congruence_check(const WachModule& w1, const WachModule& w2, unsigned level);

struct StabilityReport {
    bool pass = false;
    std::string evidence;
};
// Rebuild at n1 < N, truncate the N-build to n1, compare exactly.
StabilityReport precision_stability(const WachModule& w, unsigned n1);

}  // namespace wach

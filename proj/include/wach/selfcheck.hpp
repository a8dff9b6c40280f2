#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wach/zp.hpp"

namespace wach::selfcheck {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool pass() const { return failures == 0; }
};

// Randomized law suites with independent oracles. Deterministic per seed.
SuiteResult zp_against_bigint(u64 p, unsigned prec, std::size_t rounds, u64 seed);
SuiteResult operator_commutation(u64 p, unsigned prec, unsigned mlen, std::size_t rounds,
                                 u64 seed);
SuiteResult gamma_composition(u64 p, unsigned prec, unsigned mlen, std::size_t rounds, u64 seed);
SuiteResult weierstrass_reconstruction(u64 p, unsigned prec, unsigned mlen, std::size_t rounds,
                                       u64 seed);
SuiteResult smith_minor_gcd(u64 p, unsigned mlen, unsigned dim, std::size_t rounds, u64 seed);
SuiteResult berkowitz_vs_cofactor(u64 p, unsigned level, unsigned nq, unsigned dim,
                                  std::size_t rounds, u64 seed);
SuiteResult mu_lemma_identities(u64 p, unsigned prec, unsigned mlen);

// Full selftest battery for one prime.
std::vector<SuiteResult> run_all(u64 p, u64 seed);

}  // namespace wach::selfcheck

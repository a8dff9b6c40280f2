#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wach/errors.hpp"

namespace wach {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

std::string dec_string(u128 v);
// Decimal string reduced mod `modulus`; accepts arbitrarily long digit strings.
u128 parse_decimal_mod(std::string_view s, u128 modulus);

bool is_prime_u64(u64 n);

// The ring Z/p^N for an odd prime p. Residues are raw u128 values in [0, p^N).
// Multiplication uses a single 128-bit product while p^N fits in 64 bits and a
// shift-add reduction otherwise; p^N must stay below 2^126.
struct ZpRing {
    u64 p = 0;
    unsigned prec = 0;
    u128 modulus = 0;

    static ZpRing make(u64 p, unsigned prec);

    bool operator==(const ZpRing&) const = default;

    u128 reduce_int(long long v) const;
    u128 add(u128 a, u128 b) const;
    u128 sub(u128 a, u128 b) const;
    u128 mul(u128 a, u128 b) const;
    u128 neg(u128 a) const;
    u128 pow(u128 a, u128 e) const;
    // Hensel-lifted inverse; NotAUnit when p | a.
    u128 invert(u128 a) const;
    bool is_unit(u128 a) const { return a % p != 0; }
    // p-adic valuation of the residue class; nullopt means >= prec ("all digits zero").
    std::optional<unsigned> valuation(u128 a) const;
    // Truncate a residue of this ring into a ring of smaller precision.
    u128 truncate(u128 a, const ZpRing& smaller) const;
};

// Scalar with an attached ring. Mixed-precision operands (same p) truncate to
// the smaller N first; mismatched primes are a usage error.
class Zp {
  public:
    Zp() = default;
    Zp(const ZpRing& ring, u128 residue) : ring_(ring), r_(residue % ring.modulus) {}
    static Zp from_int(const ZpRing& ring, long long v) { return Zp(ring, ring.reduce_int(v)); }

    const ZpRing& ring() const { return ring_; }
    u64 p() const { return ring_.p; }
    unsigned prec() const { return ring_.prec; }
    u128 residue() const { return r_; }

    Zp operator+(const Zp& o) const;
    Zp operator-(const Zp& o) const;
    Zp operator*(const Zp& o) const;
    Zp operator-() const { return Zp(ring_, ring_.neg(r_)); }
    bool operator==(const Zp& o) const { return ring_ == o.ring_ && r_ == o.r_; }

    Zp inv() const { return Zp(ring_, ring_.invert(r_)); }
    bool is_unit() const { return ring_.is_unit(r_); }
    std::optional<unsigned> valuation() const { return ring_.valuation(r_); }
    Zp truncated(unsigned smaller_prec) const;

    std::string str() const { return dec_string(r_); }

  private:
    ZpRing ring_{};
    u128 r_ = 0;
};

std::string valuation_str(const std::optional<unsigned>& v, unsigned prec);

// C(a, k) at precision target_prec; a must carry g = a.prec() - target_prec
// guard digits with g >= v_p(k!), otherwise PrecisionError.
Zp binomial_coeff(const Zp& a, u64 k, unsigned target_prec);

// v_p(k!)
unsigned factorial_valuation(u64 k, u64 p);

// Canonical multiplicative lift of r mod p, computed by iterating x -> x^p.
Zp teichmuller(u64 r, const ZpRing& ring);

u64 smallest_primitive_root(u64 p);

// Symbolic character value: teich(teich_base) * integer_factor, realizable at
// any precision. Exact description so that realizations at different guard
// precisions are truncations of one p-adic number.
struct GammaValue {
    u64 teich_base = 0;          // 0 = no Teichmueller factor
    std::string integer_factor;  // decimal, may be long

    static GammaValue integer(const std::string& dec) { return GammaValue{0, dec}; }
    static GammaValue teich(u64 base) { return GammaValue{base, "1"}; }

    Zp realize(const ZpRing& ring) const;
    std::string label() const;
    bool operator==(const GammaValue&) const = default;
};

// [teichmuller(g0), 1 + p] with g0 the smallest primitive root mod p.
std::vector<GammaValue> default_gamma_generators(u64 p);

}  // namespace wach

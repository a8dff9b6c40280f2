#include "wach/zp.hpp"

#include <algorithm>
#include <cassert>

namespace wach {

std::string dec_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(char('0' + (unsigned)(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

u128 parse_decimal_mod(std::string_view s, u128 modulus) {
    if (s.empty()) throw UsageError("empty decimal string");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
        if (s.size() == 1) throw UsageError("bare sign is not a number");
    }
    u128 acc = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw UsageError(std::string("bad digit in decimal string: ") + std::string(s));
        acc = (acc * 10 + (u128)(s[i] - '0')) % modulus;
    }
    return neg ? (modulus - acc) % modulus : acc;
}

namespace {

u128 mulmod_u128(u128 a, u128 b, u128 m) {
    // m < 2^126 so doubling never overflows 128 bits.
    a %= m;
    b %= m;
    if (a <= UINT64_MAX && b <= UINT64_MAX) return (a * b) % m;
    if (b > a) std::swap(a, b);
    u128 acc = 0;
    while (b) {
        if (b & 1) {
            acc += a;
            if (acc >= m) acc -= m;
        }
        a <<= 1;
        if (a >= m) a -= m;
        b >>= 1;
    }
    return acc;
}

u64 powmod_u64(u64 a, u64 e, u64 m) {
    u128 acc = 1, base = a % m;
    while (e) {
        if (e & 1) acc = (acc * base) % m;
        base = (base * base) % m;
        e >>= 1;
    }
    return (u64)acc;
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned i = 1; i < r; ++i) {
            x = (u64)(((u128)x * x) % n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

ZpRing ZpRing::make(u64 p, unsigned prec) {
    if (p < 3) throw InputError("p must be an odd prime >= 3, got " + std::to_string(p));
    if (!is_prime_u64(p) || p % 2 == 0) throw InputError("p is not an odd prime: " + std::to_string(p));
    if (prec < 1) throw InputError("precision N must be >= 1");
    constexpr u128 kLimit = (u128)1 << 126;
    u128 m = 1;
    for (unsigned i = 0; i < prec; ++i) {
        if (m > kLimit / p)
            throw UnsupportedPrecisionError("p^N exceeds the supported range (p=" +
                                            std::to_string(p) + ", N=" + std::to_string(prec) + ")");
        m *= p;
    }
    return ZpRing{p, prec, m};
}

u128 ZpRing::reduce_int(long long v) const {
    if (v >= 0) return (u128)v % modulus;
    u128 a = (u128)(-(v + 1)) + 1;
    return (modulus - a % modulus) % modulus;
}

u128 ZpRing::add(u128 a, u128 b) const {
    u128 s = a + b;
    return s >= modulus ? s - modulus : s;
}

u128 ZpRing::sub(u128 a, u128 b) const { return a >= b ? a - b : a + modulus - b; }

u128 ZpRing::mul(u128 a, u128 b) const {
    if (modulus <= UINT64_MAX) return (a * b) % modulus;
    return mulmod_u128(a, b, modulus);
}

u128 ZpRing::neg(u128 a) const { return a == 0 ? 0 : modulus - a; }

u128 ZpRing::pow(u128 a, u128 e) const {
    u128 acc = 1 % modulus, base = a % modulus;
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

u128 ZpRing::invert(u128 a) const {
    a %= modulus;
    if (a % p == 0) throw NotAUnitError("not a unit: " + dec_string(a) + " mod " + dec_string(modulus));
    // Inverse mod p by Fermat, then Hensel lifting x -> x(2 - a x).
    u64 ap = (u64)(a % p);
    u128 x = powmod_u64(ap, p - 2, p);
    unsigned digits = 1;
    while (digits < prec) {
        x = mul(x, sub(2 % modulus, mul(a, x)));
        digits *= 2;
    }
    assert(mul(a, x) == 1 % modulus);
    return x;
}

std::optional<unsigned> ZpRing::valuation(u128 a) const {
    a %= modulus;
    if (a == 0) return std::nullopt;
    unsigned v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

u128 ZpRing::truncate(u128 a, const ZpRing& smaller) const {
    if (smaller.p != p || smaller.prec > prec) throw UsageError("invalid precision truncation");
    return a % smaller.modulus;
}

namespace {

std::pair<Zp, Zp> align(const Zp& a, const Zp& b) {
    if (a.ring() == b.ring()) return {a, b};
    if (a.p() != b.p()) throw UsageError("mixed primes in Zp arithmetic");
    unsigned n = std::min(a.prec(), b.prec());
    return {a.truncated(n), b.truncated(n)};
}

}  // namespace

Zp Zp::operator+(const Zp& o) const {
    auto [x, y] = align(*this, o);
    return Zp(x.ring(), x.ring().add(x.residue(), y.residue()));
}

Zp Zp::operator-(const Zp& o) const {
    auto [x, y] = align(*this, o);
    return Zp(x.ring(), x.ring().sub(x.residue(), y.residue()));
}

Zp Zp::operator*(const Zp& o) const {
    auto [x, y] = align(*this, o);
    return Zp(x.ring(), x.ring().mul(x.residue(), y.residue()));
}

Zp Zp::truncated(unsigned smaller_prec) const {
    if (smaller_prec == prec()) return *this;
    ZpRing r = ZpRing::make(p(), smaller_prec);
    return Zp(r, ring_.truncate(r_, r));
}

std::string valuation_str(const std::optional<unsigned>& v, unsigned prec) {
    return v ? std::to_string(*v) : ">=" + std::to_string(prec);
}

unsigned factorial_valuation(u64 k, u64 p) {
    unsigned v = 0;
    for (u64 q = p; q <= k; q *= p) {
        v += (unsigned)(k / q);
        if (q > k / p) break;
    }
    return v;
}

Zp binomial_coeff(const Zp& a, u64 k, unsigned target_prec) {
    const ZpRing& rg = a.ring();
    if (target_prec > rg.prec) throw UsageError("binomial target precision exceeds input precision");
    unsigned guard = rg.prec - target_prec;
    unsigned vk = factorial_valuation(k, rg.p);
    if (vk > guard)
        throw PrecisionError("binomial_coeff needs " + std::to_string(vk) + " guard digits, got " +
                             std::to_string(guard));
    ZpRing target = ZpRing::make(rg.p, target_prec);
    if (k == 0) return Zp(target, 1 % target.modulus);

    // numerator a(a-1)...(a-k+1) mod p^{N+g}
    u128 num = 1 % rg.modulus;
    u128 x = a.residue();
    for (u64 t = 0; t < k; ++t) {
        num = rg.mul(num, rg.sub(x, t % rg.modulus));
    }
    // k! = p^vk * unit
    u128 unit = 1 % rg.modulus;
    for (u64 t = 1; t <= k; ++t) {
        u64 f = t;
        while (f % rg.p == 0) f /= rg.p;
        unit = rg.mul(unit, f % rg.modulus);
    }
    // The true numerator has valuation >= vk, so the residue divides exactly.
    u128 pv = 1;
    for (unsigned i = 0; i < vk; ++i) pv *= rg.p;
    if (num % pv != 0) throw PrecisionError("binomial numerator not divisible as certified");
    u128 q = num / pv;
    q = rg.mul(q, rg.invert(unit));
    return Zp(target, q % target.modulus);
}

Zp teichmuller(u64 r, const ZpRing& ring) {
    u128 x = r % ring.modulus;
    if (x % ring.p == 0) return Zp(ring, 0);
    for (unsigned i = 0; i <= ring.prec + 2; ++i) {
        u128 nx = ring.pow(x, ring.p);
        if (nx == x) return Zp(ring, x);
        x = nx;
    }
    throw Error("teichmuller iteration failed to stabilize");
}

u64 smallest_primitive_root(u64 p) {
    u64 phi = p - 1;
    std::vector<u64> primes;
    u64 m = phi;
    for (u64 d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            primes.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) primes.push_back(m);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (u64 q : primes) {
            if (powmod_u64(g, phi / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw Error("no primitive root found (p not prime?)");
}

Zp GammaValue::realize(const ZpRing& ring) const {
    u128 f = parse_decimal_mod(integer_factor, ring.modulus);
    if (teich_base == 0) return Zp(ring, f);
    Zp t = teichmuller(teich_base % ring.p, ring);
    return Zp(ring, ring.mul(t.residue(), f));
}

std::string GammaValue::label() const {
    if (teich_base == 0) return integer_factor;
    std::string s = "teich(" + std::to_string(teich_base) + ")";
    if (integer_factor != "1") s += "*" + integer_factor;
    return s;
}

std::vector<GammaValue> default_gamma_generators(u64 p) {
    ZpRing probe = ZpRing::make(p, 1);
    (void)probe;
    u64 g0 = smallest_primitive_root(p);
    return {GammaValue::teich(g0), GammaValue::integer(std::to_string(p + 1))};
}

}  // namespace wach

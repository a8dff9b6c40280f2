#include <doctest.h>

#include "wach/cyclo.hpp"

using namespace wach;

namespace {

CycloElem elem(const CycloRing& r, std::vector<long long> coeffs) {
    CycloElem e = CycloElem::zero(r);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        e.c[k] = r.scalar_ring.reduce_int(coeffs[k]);
    return e;
}

CycloMatrix mat2(const CycloRing& r, const CycloElem& a, const CycloElem& b,
                 const CycloElem& c, const CycloElem& d) {
    CycloMatrix m = CycloMatrix::identity(r, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

}  // namespace

TEST_CASE("quotient precision rule") {
    CHECK(cyclo_precision(3, 4, 8, 1) == 2);
    CHECK(cyclo_precision(3, 1, 8, 1) == 1);
    CHECK(cyclo_precision(3, 4, 14, 1) == 4);
    CHECK(cyclo_precision(3, 8, 26, 2) == 2);  // m = 6: floor(21/6) - 1
    CHECK_THROWS_AS(cyclo_precision(3, 4, 3, 1), PrecisionExhaustedError);
    CHECK_THROWS_AS(cyclo_precision(3, 4, 4, 1), PrecisionExhaustedError);
    CHECK(cyclo_precision(3, 4, 5, 1) == 1);
}

TEST_CASE("ring construction") {
    CycloRing r = CycloRing::make(3, 1, 2);
    CHECK(r.deg == 2);
    CHECK(r.scalar_ring.modulus == 9);
    REQUIRE(r.modpoly.size() == 3);
    CHECK(r.modpoly[0] == 3);
    CHECK(r.modpoly[1] == 3);
    CHECK(r.modpoly[2] == 1);
    CHECK_THROWS_AS(CycloRing::make(3, 1, 0), PrecisionExhaustedError);
}

TEST_CASE("reduction of pi^2 modulo q at p = 3") {
    ZpRing zr = ZpRing::make(3, 4);
    CycloElem e = reduce_mod_qn(Series::pi_power(zr, 8, 2), 1);
    CHECK(e.ring.scalar_ring.prec == 2);
    CHECK(e == elem(e.ring, {-3, -3}));
    CHECK(!is_scalar(e));
}

TEST_CASE("arithmetic in the quotient ring") {
    CycloRing r = CycloRing::make(3, 1, 2);
    CycloElem pi = elem(r, {0, 1});
    CHECK(cyclo_mul(pi, pi) == elem(r, {-3, -3}));
    CycloElem a = elem(r, {2, 1}), b = elem(r, {1, 2});
    CHECK(cyclo_add(a, b) == elem(r, {3, 3}));
    CHECK(cyclo_sub(a, b) == elem(r, {1, -1}));
    CHECK(cyclo_neg(a) == elem(r, {-2, -1}));
    // (2 + pi)(1 + 2pi) = 2 + 5pi + 2pi^2 = 2 - 6 + (5 - 6)pi
    CHECK(cyclo_mul(a, b) == elem(r, {-4, -1}));
    CHECK(is_scalar(CycloElem::scalar(r, 5)));
    CHECK(cyclo_mul(CycloElem::scalar(r, 1), a) == a);
}

TEST_CASE("multiplication against series reduction") {
    // reduce(f) * reduce(g) = reduce(f * g): the quotient map is a ring map.
    ZpRing zr = ZpRing::make(5, 3);
    unsigned mlen = 14;
    Series f = Series::from_coeffs(zr, mlen, {3, 1, 4, 1, 5, 9, 2, 6});
    Series g = Series::from_coeffs(zr, mlen, {2, 7, 1, 8, 2, 8, 1, 8});
    CycloElem lhs = cyclo_mul(reduce_mod_qn(f, 1), reduce_mod_qn(g, 1));
    CycloElem rhs = reduce_mod_qn(series_mul(f, g), 1);
    CHECK(lhs == rhs);
}

TEST_CASE("characteristic polynomial basics") {
    CycloRing r = CycloRing::make(3, 1, 2);
    CycloMatrix one = CycloMatrix::identity(r, 2);
    auto cp = char_poly(one);
    REQUIRE(cp.size() == 3);
    CHECK(cp[0] == CycloElem::scalar(r, 1));
    CHECK(cp[1] == CycloElem::scalar(r, r.scalar_ring.reduce_int(-2)));
    CHECK(cp[2] == CycloElem::scalar(r, 1));

    CycloMatrix m1 = CycloMatrix::identity(r, 1);
    m1.at(0, 0) = elem(r, {2, 1});
    auto cp1 = char_poly(m1);
    REQUIRE(cp1.size() == 2);
    CHECK(cp1[0] == cyclo_neg(elem(r, {2, 1})));
    CHECK(cp1[1] == CycloElem::scalar(r, 1));
}

TEST_CASE("characteristic polynomial matches trace and determinant") {
    CycloRing r = CycloRing::make(5, 1, 2);
    CycloElem a = elem(r, {1, 2, 0, 3});
    CycloElem b = elem(r, {0, 1, 1});
    CycloElem c = elem(r, {4, 0, 0, 2});
    CycloElem d = elem(r, {2, 2, 2, 2});
    auto cp = char_poly(mat2(r, a, b, c, d));
    REQUIRE(cp.size() == 3);
    CHECK(cp[2] == CycloElem::scalar(r, 1));
    CHECK(cp[1] == cyclo_neg(cyclo_add(a, d)));
    CHECK(cp[0] == cyclo_sub(cyclo_mul(a, d), cyclo_mul(b, c)));
}

TEST_CASE("cayley-hamilton") {
    CycloRing r = CycloRing::make(3, 2, 2);  // degree 6 quotient
    CycloElem a = elem(r, {1, 0, 2, 0, 0, 1});
    CycloElem b = elem(r, {0, 1});
    CycloElem c = elem(r, {3, 0, 0, 0, 1});
    CycloElem d = elem(r, {2, 2});
    CycloMatrix m = mat2(r, a, b, c, d);
    auto cp = char_poly(m);
    // p(M) = 0 over the quotient ring.
    auto mul = [&](const CycloMatrix& x, const CycloMatrix& y) {
        CycloMatrix z = CycloMatrix::identity(r, 2);
        for (unsigned i = 0; i < 2; ++i)
            for (unsigned j = 0; j < 2; ++j) {
                CycloElem s = CycloElem::zero(r);
                for (unsigned k = 0; k < 2; ++k)
                    s = cyclo_add(s, cyclo_mul(x.at(i, k), y.at(k, j)));
                z.at(i, j) = s;
            }
        return z;
    };
    CycloMatrix acc = CycloMatrix::identity(r, 2);
    CycloMatrix total = CycloMatrix::identity(r, 2);
    for (unsigned i = 0; i < 2; ++i)
        for (unsigned j = 0; j < 2; ++j) total.at(i, j) = CycloElem::zero(r);
    for (unsigned k = 0; k < cp.size(); ++k) {
        for (unsigned i = 0; i < 2; ++i)
            for (unsigned j = 0; j < 2; ++j)
                total.at(i, j) = cyclo_add(total.at(i, j), cyclo_mul(cp[k], acc.at(i, j)));
        if (k + 1 < cp.size()) acc = mul(acc, m);
    }
    for (unsigned i = 0; i < 2; ++i)
        for (unsigned j = 0; j < 2; ++j) CHECK(total.at(i, j).is_zero());
}

#include "wach/linalg.hpp"

#include <algorithm>
#include <cassert>

namespace wach {

namespace {

void check_dim(unsigned dim) {
    if (dim < 1 || dim > kMaxDim)
        throw UsageError("matrix dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

ConstMatrix ConstMatrix::identity(const ZpRing& r, unsigned dim) {
    check_dim(dim);
    ConstMatrix m{r, dim, std::vector<u128>((std::size_t)dim * dim, 0)};
    for (unsigned i = 0; i < dim; ++i) m.at(i, i) = 1 % r.modulus;
    return m;
}

ConstMatrix ConstMatrix::from_rows(const ZpRing& r, const std::vector<std::vector<u128>>& rows) {
    check_dim((unsigned)rows.size());
    ConstMatrix m{r, (unsigned)rows.size(), {}};
    m.a.reserve((std::size_t)m.dim * m.dim);
    for (const auto& row : rows) {
        if (row.size() != rows.size()) throw UsageError("constant matrix must be square");
        for (u128 v : row) m.a.push_back(v % r.modulus);
    }
    return m;
}

ConstMatrix const_mul(const ConstMatrix& x, const ConstMatrix& y) {
    if (!(x.ring == y.ring) || x.dim != y.dim) throw UsageError("matrix frames differ");
    ConstMatrix r{x.ring, x.dim, std::vector<u128>((std::size_t)x.dim * x.dim, 0)};
    for (unsigned i = 0; i < x.dim; ++i)
        for (unsigned k = 0; k < x.dim; ++k) {
            if (x.at(i, k) == 0) continue;
            for (unsigned j = 0; j < x.dim; ++j)
                r.at(i, j) = x.ring.add(r.at(i, j), x.ring.mul(x.at(i, k), y.at(k, j)));
        }
    return r;
}

u128 const_det(const ConstMatrix& x) {
    // Subset DP: f(S) = det of the top-|S| rows on column set S.
    const unsigned d = x.dim;
    std::vector<u128> f((std::size_t)1 << d, 0);
    f[0] = 1 % x.ring.modulus;
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        unsigned k = (unsigned)__builtin_popcount(mask) - 1;
        u128 acc = 0;
        unsigned pos = 0;
        for (unsigned j = 0; j < d; ++j) {
            if (!(mask & (1u << j))) continue;
            u128 term = x.ring.mul(x.at(k, j), f[mask ^ (1u << j)]);
            acc = ((k + pos) % 2 == 0) ? x.ring.add(acc, term) : x.ring.sub(acc, term);
            ++pos;
        }
        f[mask] = acc;
    }
    return f[(1u << d) - 1];
}

ConstMatrix const_inv(const ConstMatrix& x) {
    const unsigned d = x.dim;
    const ZpRing& rg = x.ring;
    ConstMatrix work = x;
    ConstMatrix inv = ConstMatrix::identity(rg, d);
    for (unsigned col = 0; col < d; ++col) {
        unsigned piv = col;
        while (piv < d && !rg.is_unit(work.at(piv, col))) ++piv;
        if (piv == d) throw NotAUnitError("matrix has no unit pivot in column " +
                                          std::to_string(col));
        if (piv != col)
            for (unsigned j = 0; j < d; ++j) {
                std::swap(work.at(piv, j), work.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        u128 pi = rg.invert(work.at(col, col));
        for (unsigned j = 0; j < d; ++j) {
            work.at(col, j) = rg.mul(work.at(col, j), pi);
            inv.at(col, j) = rg.mul(inv.at(col, j), pi);
        }
        for (unsigned i = 0; i < d; ++i) {
            if (i == col) continue;
            u128 f = work.at(i, col);
            if (f == 0) continue;
            for (unsigned j = 0; j < d; ++j) {
                work.at(i, j) = rg.sub(work.at(i, j), rg.mul(f, work.at(col, j)));
                inv.at(i, j) = rg.sub(inv.at(i, j), rg.mul(f, inv.at(col, j)));
            }
        }
    }
    return inv;
}

SeriesMatrix SeriesMatrix::zero(const ZpRing& r, unsigned mlen, unsigned dim) {
    check_dim(dim);
    SeriesMatrix m;
    m.dim = dim;
    m.e.assign((std::size_t)dim * dim, Series::zero(r, mlen));
    return m;
}

SeriesMatrix SeriesMatrix::identity(const ZpRing& r, unsigned mlen, unsigned dim) {
    SeriesMatrix m = zero(r, mlen, dim);
    for (unsigned i = 0; i < dim; ++i) m.at(i, i) = Series::constant(r, mlen, 1);
    return m;
}

SeriesMatrix SeriesMatrix::from_const(const ConstMatrix& c, unsigned mlen) {
    SeriesMatrix m = zero(c.ring, mlen, c.dim);
    for (unsigned i = 0; i < c.dim; ++i)
        for (unsigned j = 0; j < c.dim; ++j)
            m.at(i, j) = Series::constant(c.ring, mlen, c.at(i, j));
    return m;
}

bool SeriesMatrix::operator==(const SeriesMatrix& o) const {
    return dim == o.dim && e == o.e;
}

namespace {

void check_mats(const SeriesMatrix& x, const SeriesMatrix& y) {
    if (x.dim != y.dim) throw UsageError("matrix dimensions differ");
    require_same_frame(x.e.front(), y.e.front());
}

}  // namespace

SeriesMatrix mat_add(const SeriesMatrix& x, const SeriesMatrix& y) {
    check_mats(x, y);
    SeriesMatrix r = x;
    for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] = series_add(x.e[i], y.e[i]);
    return r;
}

SeriesMatrix mat_sub(const SeriesMatrix& x, const SeriesMatrix& y) {
    check_mats(x, y);
    SeriesMatrix r = x;
    for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] = series_sub(x.e[i], y.e[i]);
    return r;
}

SeriesMatrix mat_mul(const SeriesMatrix& x, const SeriesMatrix& y) {
    check_mats(x, y);
    SeriesMatrix r = SeriesMatrix::zero(x.ring(), x.mlen(), x.dim);
    for (unsigned i = 0; i < x.dim; ++i)
        for (unsigned j = 0; j < x.dim; ++j) {
            Series acc = series_mul(x.at(i, 0), y.at(0, j));
            for (unsigned k = 1; k < x.dim; ++k)
                acc = series_add(acc, series_mul(x.at(i, k), y.at(k, j)));
            r.at(i, j) = std::move(acc);
        }
    return r;
}

SeriesMatrix mat_mul(const ConstMatrix& x, const SeriesMatrix& y) {
    if (x.dim != y.dim || !(x.ring == y.ring())) throw UsageError("matrix frames differ");
    SeriesMatrix r = SeriesMatrix::zero(y.ring(), y.mlen(), y.dim);
    for (unsigned i = 0; i < y.dim; ++i)
        for (unsigned j = 0; j < y.dim; ++j) {
            Series acc = series_scalar_mul(y.at(0, j), x.at(i, 0));
            for (unsigned k = 1; k < y.dim; ++k)
                acc = series_add(acc, series_scalar_mul(y.at(k, j), x.at(i, k)));
            r.at(i, j) = std::move(acc);
        }
    return r;
}

SeriesMatrix mat_mul(const SeriesMatrix& x, const ConstMatrix& y) {
    if (x.dim != y.dim || !(x.ring() == y.ring)) throw UsageError("matrix frames differ");
    SeriesMatrix r = SeriesMatrix::zero(x.ring(), x.mlen(), x.dim);
    for (unsigned i = 0; i < x.dim; ++i)
        for (unsigned j = 0; j < x.dim; ++j) {
            Series acc = series_scalar_mul(x.at(i, 0), y.at(0, j));
            for (unsigned k = 1; k < x.dim; ++k)
                acc = series_add(acc, series_scalar_mul(x.at(i, k), y.at(k, j)));
            r.at(i, j) = std::move(acc);
        }
    return r;
}

SeriesMatrix mat_apply(const Substitution& sub, const SeriesMatrix& x) {
    SeriesMatrix r = x;
    for (auto& entry : r.e) entry = sub.apply(entry);
    return r;
}

namespace {

// All (d-1)x(d-1) minors obtained by deleting row `del` (and one column),
// via subset DP over column sets. minors[j] = det(X without row del, col j).
std::vector<Series> minors_row_deleted(const SeriesMatrix& x, unsigned del) {
    const unsigned d = x.dim;
    const ZpRing& rg = x.ring();
    const unsigned mlen = x.mlen();
    std::vector<Series> f((std::size_t)1 << d, Series::zero(rg, mlen));
    f[0] = Series::constant(rg, mlen, 1);
    std::vector<unsigned> rows;
    for (unsigned i = 0; i < d; ++i)
        if (i != del) rows.push_back(i);
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        unsigned k = (unsigned)__builtin_popcount(mask);
        if (k > rows.size()) continue;
        unsigned row = rows[k - 1];
        Series acc = Series::zero(rg, mlen);
        unsigned pos = 0;
        for (unsigned j = 0; j < d; ++j) {
            if (!(mask & (1u << j))) continue;
            Series term = series_mul(x.at(row, j), f[mask ^ (1u << j)]);
            acc = (pos % 2 == 0) ? series_add(acc, term) : series_sub(acc, term);
            ++pos;
        }
        f[mask] = std::move(acc);
    }
    const unsigned full = (1u << d) - 1;
    std::vector<Series> minors;
    minors.reserve(d);
    for (unsigned j = 0; j < d; ++j) minors.push_back(f[full ^ (1u << j)]);
    return minors;
}

}  // namespace

DetAdj det_adjugate(const SeriesMatrix& x) {
    const unsigned d = x.dim;
    const ZpRing& rg = x.ring();
    const unsigned mlen = x.mlen();
    SeriesMatrix adj = SeriesMatrix::zero(rg, mlen, d);
    Series det = Series::zero(rg, mlen);
    if (d == 1) {
        adj.at(0, 0) = Series::constant(rg, mlen, 1);
        det = x.at(0, 0);
        return DetAdj{det, adj};
    }
    for (unsigned i = 0; i < d; ++i) {
        std::vector<Series> minors = minors_row_deleted(x, i);
        for (unsigned j = 0; j < d; ++j) {
            Series cof = ((i + j) % 2 == 0) ? minors[j] : series_neg(minors[j]);
            adj.at(j, i) = std::move(cof);
        }
        if (i == d - 1) {
            for (unsigned j = 0; j < d; ++j) {
                Series term = series_mul(x.at(i, j), adj.at(j, i));
                det = series_add(det, term);
            }
        }
    }
    return DetAdj{det, adj};
}

bool is_integral(const SeriesMatrix& x) {
    return std::all_of(x.e.begin(), x.e.end(),
                       [](const Series& s) { return normalize(s).denom == 0; });
}

StructuredInverse mat_inv_structured(const SeriesMatrix& x, unsigned s) {
    if (!is_integral(x)) throw UsageError("structured inversion expects an integral matrix");
    DetAdj da = det_adjugate(x);
    ExactQuotient eq = divide_exact(da.det, QPower{1, s});
    if (eq.certified_len == 0 || !eq.quotient.ring.is_unit(eq.quotient.c[0]))
        throw NotAUnitError("determinant / q^" + std::to_string(s) +
                            " is not a unit: " + eq.quotient.str());
    Series uinv = series_invert(eq.quotient);
    StructuredInverse out{SeriesMatrix::zero(x.ring(), x.mlen(), x.dim), eq.quotient, s,
                          eq.certified_len};
    for (unsigned i = 0; i < x.dim; ++i)
        for (unsigned j = 0; j < x.dim; ++j) {
            Series y = series_mul(da.adj.at(i, j), uinv);
            for (unsigned k = eq.certified_len; k < y.mlen; ++k) y.c[k] = 0;
            out.y.at(i, j) = std::move(y);
        }
    return out;
}

namespace {

// F_p[pi]/pi^M polynomial helpers on dense u64 coefficient vectors.
using Poly = std::vector<u64>;

unsigned poly_val(const Poly& f) {
    for (unsigned k = 0; k < f.size(); ++k)
        if (f[k] != 0) return k;
    return (unsigned)f.size();
}

Poly poly_inv_unit(const Poly& u, u64 p) {
    const unsigned m = (unsigned)u.size();
    Poly r(m, 0);
    u64 c0 = u[0] % p;
    // Fermat inverse mod p.
    u64 inv = 1, base = c0, e = p - 2;
    while (e) {
        if (e & 1) inv = inv * base % p;
        base = base * base % p;
        e >>= 1;
    }
    r[0] = inv;
    for (unsigned k = 1; k < m; ++k) {
        u64 acc = 0;
        for (unsigned j = 1; j <= k; ++j) acc = (acc + u[j] % p * r[k - j]) % p;
        r[k] = (p - acc % p) % p * inv % p;
    }
    return r;
}

}  // namespace

PiSmithForm smith_pi(const std::vector<std::vector<Series>>& rows) {
    if (rows.empty() || rows[0].empty()) throw UsageError("empty matrix");
    const unsigned r = (unsigned)rows.size();
    const unsigned c = (unsigned)rows[0].size();
    const u64 p = rows[0][0].ring.p;
    const unsigned mlen = rows[0][0].mlen;
    std::vector<std::vector<Poly>> g(r, std::vector<Poly>(c, Poly(mlen, 0)));
    for (unsigned i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw UsageError("ragged matrix");
        for (unsigned j = 0; j < c; ++j) {
            const Series& s = rows[i][j];
            if (s.denom != 0) throw UsageError("smith_pi expects integral entries");
            if (s.mlen != mlen || s.ring.p != p) throw UsageError("series frames differ");
            for (unsigned k = 0; k < mlen; ++k) g[i][j][k] = (u64)(s.c[k] % p);
        }
    }
    const unsigned rank = std::min(r, c);
    PiSmithForm out{std::vector<unsigned>(rank, mlen), mlen};
    for (unsigned t = 0; t < rank; ++t) {
        unsigned best = mlen, bi = t, bj = t;
        for (unsigned i = t; i < r; ++i)
            for (unsigned j = t; j < c; ++j) {
                unsigned v = poly_val(g[i][j]);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best == mlen) break;  // remaining block vanishes mod pi^M
        std::swap(g[bi], g[t]);
        if (bj != t)
            for (unsigned i = 0; i < r; ++i) std::swap(g[i][bj], g[i][t]);
        out.exponents[t] = best;
        Poly unit(mlen, 0);
        for (unsigned k = best; k < mlen; ++k) unit[k - best] = g[t][t][k];
        Poly winv = poly_inv_unit(unit, p);
        // entry/pivot mod pi^{M-best}: shift out pi^best, multiply by unit inverse.
        auto quotient_by_pivot = [&](const Poly& entry) {
            Poly shifted(mlen, 0);
            for (unsigned k = best; k < mlen; ++k) shifted[k - best] = entry[k];
            Poly q(mlen, 0);
            for (unsigned k = 0; k < mlen; ++k) {
                u64 acc = 0;
                for (unsigned j = 0; j <= k; ++j) acc = (acc + shifted[j] * winv[k - j]) % p;
                q[k] = acc;
            }
            return q;
        };
        // Clear column t below the pivot.
        for (unsigned i = t + 1; i < r; ++i) {
            if (poly_val(g[i][t]) == mlen) continue;
            Poly q = quotient_by_pivot(g[i][t]);
            for (unsigned j = t; j < c; ++j) {
                for (unsigned k = 0; k < mlen; ++k) {
                    u64 acc = 0;
                    for (unsigned l = 0; l <= k; ++l) acc = (acc + q[l] * g[t][j][k - l]) % p;
                    g[i][j][k] = (g[i][j][k] + p - acc) % p;
                }
            }
            assert(poly_val(g[i][t]) == mlen);
        }
        // Clear row t right of the pivot.
        for (unsigned j = t + 1; j < c; ++j) {
            if (poly_val(g[t][j]) == mlen) continue;
            Poly q = quotient_by_pivot(g[t][j]);
            for (unsigned i = t; i < r; ++i) {
                for (unsigned k = 0; k < mlen; ++k) {
                    u64 acc = 0;
                    for (unsigned l = 0; l <= k; ++l) acc = (acc + q[l] * g[i][t][k - l]) % p;
                    g[i][j][k] = (g[i][j][k] + p - acc) % p;
                }
            }
            assert(poly_val(g[t][j]) == mlen);
        }
    }
    std::sort(out.exponents.begin(), out.exponents.end());
    return out;
}

ZpKernel zp_kernel(const ZpRing& ring, const std::vector<std::vector<u128>>& rows,
                   unsigned cols) {
    const unsigned r = (unsigned)rows.size();
    const unsigned c = cols;
    ZpKernel out;
    // Diagonalize U*A*V = D over Z/p^N tracking V; kernel generators are scaled V columns.
    std::vector<std::vector<u128>> a(r, std::vector<u128>(c, 0));
    for (unsigned i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw UsageError("ragged matrix");
        for (unsigned j = 0; j < c; ++j) a[i][j] = rows[i][j] % ring.modulus;
    }
    std::vector<std::vector<u128>> v(c, std::vector<u128>(c, 0));
    for (unsigned j = 0; j < c; ++j) v[j][j] = 1 % ring.modulus;

    auto val_of = [&](u128 x) -> unsigned {
        auto t = ring.valuation(x);
        return t ? *t : ring.prec;
    };

    const unsigned rank = std::min(r, c);
    std::vector<unsigned> diag_val(c, ring.prec);  // p-valuation of diagonal entry per column
    unsigned t = 0;
    for (; t < rank; ++t) {
        unsigned best = ring.prec, bi = t, bj = t;
        for (unsigned i = t; i < r; ++i)
            for (unsigned j = t; j < c; ++j) {
                unsigned w = val_of(a[i][j]);
                if (w < best) {
                    best = w;
                    bi = i;
                    bj = j;
                }
            }
        if (best == ring.prec) break;
        std::swap(a[bi], a[t]);
        if (bj != t) {
            for (unsigned i = 0; i < r; ++i) std::swap(a[i][bj], a[i][t]);
            std::swap(v[bj], v[t]);  // v stored column-major: v[j] is column j
        }
        // Scale column t so the pivot becomes exactly p^best.
        u128 unitpart = a[t][t];
        for (unsigned s = 0; s < best; ++s) unitpart /= ring.p;
        u128 ui = ring.invert(unitpart);
        for (unsigned i = 0; i < r; ++i) a[i][t] = ring.mul(a[i][t], ui);
        for (unsigned k = 0; k < c; ++k) v[t][k] = ring.mul(v[t][k], ui);
        // Row elimination (no tracking needed).
        for (unsigned i = t + 1; i < r; ++i) {
            if (a[i][t] == 0) continue;
            u128 q = a[i][t];
            for (unsigned s = 0; s < best; ++s) q /= ring.p;
            for (unsigned j = t; j < c; ++j) a[i][j] = ring.sub(a[i][j], ring.mul(q, a[t][j]));
        }
        // Column elimination, tracked in V.
        for (unsigned j = t + 1; j < c; ++j) {
            if (a[t][j] == 0) continue;
            u128 q = a[t][j];
            for (unsigned s = 0; s < best; ++s) q /= ring.p;
            for (unsigned i = t; i < r; ++i) a[i][j] = ring.sub(a[i][j], ring.mul(q, a[i][t]));
            for (unsigned k = 0; k < c; ++k) v[j][k] = ring.sub(v[j][k], ring.mul(q, v[t][k]));
        }
        diag_val[t] = best;
    }
    // Kernel of D: coordinate j contributes p^{N - a_j} e_j (a_j >= 1) or e_j when
    // the diagonal vanishes / the column is pivot-free.
    out.modp_dim = 0;
    for (unsigned j = 0; j < c; ++j) {
        unsigned aj = diag_val[j];
        if (aj == 0) continue;
        ++out.modp_dim;
        u128 scale = 1;
        for (unsigned s = 0; s < ring.prec - aj; ++s) scale *= ring.p;
        std::vector<u128> vec(c, 0);
        for (unsigned k = 0; k < c; ++k) vec[k] = ring.mul(v[j][k], scale % ring.modulus);
        bool nonzero = std::any_of(vec.begin(), vec.end(), [](u128 x) { return x != 0; });
        if (nonzero) out.basis.push_back(std::move(vec));
    }
    return out;
}

}  // namespace wach

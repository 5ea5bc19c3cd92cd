#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "msra/field.hpp"

namespace msra {

/// Dense row-major matrix over GF(q). Entries are canonical u64 field values;
/// the field context is passed to each operation.
struct FieldMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<u64> a;

    FieldMatrix() = default;
    FieldMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    u64& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    u64 at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    static FieldMatrix identity(std::size_t n) {
        FieldMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    bool operator==(const FieldMatrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
};

/// Diagonal matrix stored as its diagonal only. Coding matrices keep every
/// entry nonzero; transformed interference matrices may contain zeros.
struct DiagonalMatrix {
    std::vector<u64> d;

    DiagonalMatrix() = default;
    explicit DiagonalMatrix(std::vector<u64> diag) : d(std::move(diag)) {}

    std::size_t dim() const { return d.size(); }

    FieldMatrix to_dense() const {
        FieldMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
        return m;
    }

    bool operator==(const DiagonalMatrix& o) const { return d == o.d; }
};

inline FieldMatrix mat_mul(const PrimeField& f, const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("mat_mul: inner dimensions differ");
    FieldMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t l = 0; l < a.cols; ++l) {
            u64 v = a.at(i, l);
            if (v == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) {
                c.at(i, j) = f.add(c.at(i, j), f.mul(v, b.at(l, j)));
            }
        }
    }
    return c;
}

/// Left-multiply by a diagonal matrix: row m of v scaled by d[m].
inline FieldMatrix diag_apply(const PrimeField& f, const DiagonalMatrix& d, const FieldMatrix& v) {
    if (d.dim() != v.rows) throw std::invalid_argument("diag_apply: dimension mismatch");
    FieldMatrix out = v;
    for (std::size_t r = 0; r < v.rows; ++r) {
        for (std::size_t c = 0; c < v.cols; ++c) {
            out.at(r, c) = f.mul(d.d[r], v.at(r, c));
        }
    }
    return out;
}

inline std::vector<u64> diag_apply(const PrimeField& f, const DiagonalMatrix& d,
                                   const std::vector<u64>& v) {
    if (d.dim() != v.size()) throw std::invalid_argument("diag_apply: dimension mismatch");
    std::vector<u64> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = f.mul(d.d[i], v[i]);
    return out;
}

inline FieldMatrix transpose(const FieldMatrix& m) {
    FieldMatrix t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
    }
    return t;
}

/// Row rank by Gaussian elimination on a copy. Exact arithmetic needs no
/// pivot-magnitude strategy: the first nonzero entry in the column serves.
inline std::size_t rank(const PrimeField& f, FieldMatrix m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t pivot = r;
        while (pivot < m.rows && m.at(pivot, c) == 0) ++pivot;
        if (pivot == m.rows) continue;
        if (pivot != r) {
            for (std::size_t j = c; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(r, j));
        }
        u64 pinv = f.inv(m.at(r, c));
        for (std::size_t i = r + 1; i < m.rows; ++i) {
            u64 factor = f.mul(m.at(i, c), pinv);
            if (factor == 0) continue;
            for (std::size_t j = c; j < m.cols; ++j) {
                m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(r, j)));
            }
        }
        ++r;
    }
    return r;
}

/// Solve a x = b for square full-rank a (b may have several columns).
/// Throws SingularMatrix when elimination finds no pivot.
inline FieldMatrix solve(const PrimeField& f, FieldMatrix a, FieldMatrix b) {
    if (a.rows != a.cols) throw std::invalid_argument("solve: matrix not square");
    if (a.rows != b.rows) throw std::invalid_argument("solve: rhs rows mismatch");
    const std::size_t n = a.rows;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && a.at(pivot, c) == 0) ++pivot;
        if (pivot == n) throw SingularMatrix("solve: singular system");
        if (pivot != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(pivot, j), a.at(c, j));
            for (std::size_t j = 0; j < b.cols; ++j) std::swap(b.at(pivot, j), b.at(c, j));
        }
        u64 pinv = f.inv(a.at(c, c));
        for (std::size_t j = 0; j < n; ++j) a.at(c, j) = f.mul(a.at(c, j), pinv);
        for (std::size_t j = 0; j < b.cols; ++j) b.at(c, j) = f.mul(b.at(c, j), pinv);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            u64 factor = a.at(i, c);
            if (factor == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(i, j) = f.sub(a.at(i, j), f.mul(factor, a.at(c, j)));
            }
            for (std::size_t j = 0; j < b.cols; ++j) {
                b.at(i, j) = f.sub(b.at(i, j), f.mul(factor, b.at(c, j)));
            }
        }
    }
    return b;
}

inline std::vector<u64> solve(const PrimeField& f, const FieldMatrix& a, const std::vector<u64>& b) {
    FieldMatrix rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs.at(i, 0) = b[i];
    FieldMatrix x = solve(f, a, std::move(rhs));
    std::vector<u64> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = x.at(i, 0);
    return out;
}

/// Exact determinant via elimination; meant for the small m x m blocks of the
/// per-coordinate MDS check (m <= n-k).
inline u64 det_small(const PrimeField& f, FieldMatrix m) {
    if (m.rows != m.cols) throw std::invalid_argument("det_small: matrix not square");
    const std::size_t n = m.rows;
    u64 det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && m.at(pivot, c) == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != c) {
            for (std::size_t j = c; j < n; ++j) std::swap(m.at(pivot, j), m.at(c, j));
            det = f.neg(det);
        }
        det = f.mul(det, m.at(c, c));
        u64 pinv = f.inv(m.at(c, c));
        for (std::size_t i = c + 1; i < n; ++i) {
            u64 factor = f.mul(m.at(i, c), pinv);
            if (factor == 0) continue;
            for (std::size_t j = c; j < n; ++j) {
                m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(c, j)));
            }
        }
    }
    return det;
}

}  // namespace msra

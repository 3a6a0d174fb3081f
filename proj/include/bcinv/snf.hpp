#pragma once

#include <string>
#include <vector>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"

namespace bcinv {

/// Dense integer matrix, row-major, arbitrary-precision entries.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Int> entries;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, 0) {
        if (r < 1 || c < 1) fail(errc::invalid_argument, "matrix dimensions must be positive");
    }
    IntMatrix(int r, int c, std::vector<Int> e) : rows(r), cols(c), entries(std::move(e)) {
        if (r < 1 || c < 1) fail(errc::invalid_argument, "matrix dimensions must be positive");
        if (entries.size() != static_cast<std::size_t>(r) * c)
            fail(errc::invalid_argument, "entry count does not match dimensions");
    }

    static IntMatrix identity(int k) {
        IntMatrix m(k, k);
        for (int i = 0; i < k; ++i) m.at(i, i) = 1;
        return m;
    }

    Int& at(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
    const Int& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * cols + j]; }

    bool operator==(const IntMatrix& other) const {
        return rows == other.rows && cols == other.cols && entries == other.entries;
    }
};

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols != b.rows) fail(errc::invalid_argument, "matrix dimensions do not compose");
    IntMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < b.cols; ++j) c.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return c;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Int determinant(IntMatrix a) {
    if (a.rows != a.cols) fail(errc::invalid_argument, "determinant needs a square matrix");
    const int n = a.rows;
    Int sign = 1, prev = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            int swap_row = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(swap_row, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign * a.at(n - 1, n - 1);
}

/// A = P * B * Q with P, Q unimodular and B diagonal, nonnegative, with the
/// divisibility chain b_11 | b_22 | ... and zeros last.
struct SNFDecomposition {
    IntMatrix P;
    IntMatrix B;
    IntMatrix Q;
};

namespace detail {

/// Working state maintaining the invariant A = P * W * Q while W is reduced
/// by elementary unimodular row and column operations.
struct SnfWorkspace {
    IntMatrix W, P, Q;

    explicit SnfWorkspace(const IntMatrix& a)
        : W(a), P(IntMatrix::identity(a.rows)), Q(IntMatrix::identity(a.cols)) {}

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < W.cols; ++c) std::swap(W.at(i, c), W.at(j, c));
        for (int r = 0; r < P.rows; ++r) std::swap(P.at(r, i), P.at(r, j));
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < W.rows; ++r) std::swap(W.at(r, i), W.at(r, j));
        for (int c = 0; c < Q.cols; ++c) std::swap(Q.at(i, c), Q.at(j, c));
    }
    /// row i += c * row j
    void add_row(int i, int j, const Int& c) {
        for (int k = 0; k < W.cols; ++k) W.at(i, k) += c * W.at(j, k);
        for (int r = 0; r < P.rows; ++r) P.at(r, j) -= c * P.at(r, i);
    }
    /// col i += c * col j
    void add_col(int i, int j, const Int& c) {
        for (int k = 0; k < W.rows; ++k) W.at(k, i) += c * W.at(k, j);
        for (int q = 0; q < Q.cols; ++q) Q.at(j, q) -= c * Q.at(i, q);
    }
    void negate_row(int i) {
        for (int k = 0; k < W.cols; ++k) W.at(i, k) = -W.at(i, k);
        for (int r = 0; r < P.rows; ++r) P.at(r, i) = -P.at(r, i);
    }

    bool column_clean(int s) const {
        for (int i = s + 1; i < W.rows; ++i)
            if (W.at(i, s) != 0) return false;
        return true;
    }
    bool row_clean(int s) const {
        for (int j = s + 1; j < W.cols; ++j)
            if (W.at(s, j) != 0) return false;
        return true;
    }

    /// Euclidean elimination below the pivot using row operations only.
    void clean_column(int s) {
        for (;;) {
            int i = -1;
            for (int r = s + 1; r < W.rows; ++r)
                if (W.at(r, s) != 0) {
                    i = r;
                    break;
                }
            if (i < 0) return;
            Int quotient = W.at(i, s) / W.at(s, s);
            add_row(i, s, -quotient);
            if (W.at(i, s) != 0) swap_rows(s, i);  // strictly smaller remainder becomes pivot
        }
    }
    void clean_row(int s) {
        for (;;) {
            int j = -1;
            for (int c = s + 1; c < W.cols; ++c)
                if (W.at(s, c) != 0) {
                    j = c;
                    break;
                }
            if (j < 0) return;
            Int quotient = W.at(s, j) / W.at(s, s);
            add_col(j, s, -quotient);
            if (W.at(s, j) != 0) swap_cols(s, j);
        }
    }

    /// Smallest |nonzero| in the trailing submatrix, moved to (s, s).
    /// Returns false when the submatrix is zero.
    bool place_pivot(int s) {
        int pi = -1, pj = -1;
        Int best = 0;
        for (int i = s; i < W.rows; ++i)
            for (int j = s; j < W.cols; ++j) {
                if (W.at(i, j) == 0) continue;
                Int magnitude = abs(W.at(i, j));
                if (pi < 0 || magnitude < best) {
                    best = magnitude;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) return false;
        swap_rows(s, pi);
        swap_cols(s, pj);
        return true;
    }
};

}  // namespace detail

/// Classical gcd elimination with the smallest-|entry| pivot rule, tracking
/// P and Q as products of the elementary operations.
inline SNFDecomposition smith_normal_form(const IntMatrix& a) {
    detail::SnfWorkspace ws(a);
    const int steps = std::min(a.rows, a.cols);
    for (int s = 0; s < steps; ++s) {
        if (!ws.place_pivot(s)) break;  // remaining block is zero
        for (;;) {
            ws.clean_column(s);
            ws.clean_row(s);
            if (!ws.column_clean(s) || !ws.row_clean(s)) continue;
            // Pivot must divide the whole trailing block for the chain.
            int bad_row = -1;
            for (int i = s + 1; i < ws.W.rows && bad_row < 0; ++i)
                for (int j = s + 1; j < ws.W.cols; ++j)
                    if (ws.W.at(i, j) % ws.W.at(s, s) != 0) {
                        bad_row = i;
                        break;
                    }
            if (bad_row < 0) break;
            ws.add_row(s, bad_row, 1);
        }
        if (ws.W.at(s, s) < 0) ws.negate_row(s);  // sign absorbed into P
    }
    return {ws.P, ws.W, ws.Q};
}

/// Cyclic orders (b_11, ..., b_kk) of Z^k / A Z^k for nonsingular A.
inline std::vector<Natural> quotient_decomposition(const IntMatrix& a) {
    if (a.rows != a.cols) fail(errc::invalid_argument, "quotient needs a square matrix");
    SNFDecomposition snf = smith_normal_form(a);
    std::vector<Natural> orders;
    for (int i = 0; i < a.rows; ++i) {
        if (snf.B.at(i, i) == 0)
            fail(errc::infinite_quotient, "matrix is singular; the quotient is infinite");
        orders.push_back(Natural(snf.B.at(i, i)));
    }
    return orders;
}

/// The crossed product of a rank-k odometer quotient is a bundle of
/// matrix algebras over the k-torus; this records its two invariants.
struct TorusBundleDescriptor {
    int torus_rank = 0;
    Natural fiber_size = 1;
};

inline TorusBundleDescriptor crossed_product_descriptor(const IntMatrix& a) {
    if (a.rows != a.cols) fail(errc::invalid_argument, "descriptor needs a square matrix");
    Int det = determinant(a);
    if (det == 0) fail(errc::infinite_quotient, "matrix is singular; the quotient is infinite");
    return {a.rows, Natural(abs(det))};
}

}  // namespace bcinv

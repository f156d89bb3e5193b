#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "dynshort/errors.hpp"
#include "dynshort/poly.hpp"

namespace dynshort {

/// Strictly sorted set of distinct indices; the row/column sets of the
/// dynamic inverse and the source/target sets of the distance structures.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::vector<int> items) : items_(std::move(items)) {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    static IndexSet full(int n) {
        std::vector<int> v(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
        IndexSet s;
        s.items_ = std::move(v);
        return s;
    }

    bool contains(int x) const {
        return std::binary_search(items_.begin(), items_.end(), x);
    }
    /// Position of x in sorted order, or -1 if absent.
    int rank(int x) const {
        auto it = std::lower_bound(items_.begin(), items_.end(), x);
        if (it == items_.end() || *it != x) return -1;
        return static_cast<int>(it - items_.begin());
    }
    bool add(int x) {
        auto it = std::lower_bound(items_.begin(), items_.end(), x);
        if (it != items_.end() && *it == x) return false;
        items_.insert(it, x);
        return true;
    }
    bool remove(int x) {
        auto it = std::lower_bound(items_.begin(), items_.end(), x);
        if (it == items_.end() || *it != x) return false;
        items_.erase(it);
        return true;
    }

    int size() const { return static_cast<int>(items_.size()); }
    bool empty() const { return items_.empty(); }
    int operator[](int k) const { return items_[static_cast<size_t>(k)]; }
    const std::vector<int>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

private:
    std::vector<int> items_;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix over a ring context R. One contiguous Limb buffer;
// entry (i,j) is the span of ring.width() Limbs returned by at(i,j).
// Limb value-initialization must equal the ring's zero (true for all contexts
// here), so a fresh matrix is the zero matrix.
// ---------------------------------------------------------------------------
template <class R>
class Mat {
public:
    using Limb = typename R::Limb;

    Mat() = default;
    Mat(const R& ring, int rows, int cols)
        : rows_(rows),
          cols_(cols),
          w_(ring.width()),
          data_(static_cast<size_t>(rows) * static_cast<size_t>(cols) * ring.width()) {
        if (rows < 0 || cols < 0) throw DimensionError("Mat: negative dimensions");
    }

    static Mat identity(const R& ring, int n) {
        Mat m(ring, n, n);
        for (int i = 0; i < n; ++i) ring.set_one(m.at(i, i));
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t elem_width() const { return w_; }

    Limb* at(int i, int j) {
        return data_.data() + (static_cast<size_t>(i) * cols_ + static_cast<size_t>(j)) * w_;
    }
    const Limb* at(int i, int j) const {
        return data_.data() + (static_cast<size_t>(i) * cols_ + static_cast<size_t>(j)) * w_;
    }
    Limb* row(int i) { return at(i, 0); }
    const Limb* row(int i) const { return at(i, 0); }

    void swap_rows(int i, int j) {
        if (i == j) return;
        std::swap_ranges(row(i), row(i) + static_cast<size_t>(cols_) * w_, row(j));
    }

private:
    int rows_ = 0, cols_ = 0;
    size_t w_ = 0;
    std::vector<Limb> data_;
};

namespace detail {

template <class R>
Mat<R> mul_naive(const R& ring, const Mat<R>& a, const Mat<R>& b) {
    Mat<R> c(ring, a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const auto* aik = a.at(i, k);
            if (ring.is_zero(aik)) continue;
            for (int j = 0; j < b.cols(); ++j) {
                ring.mul_add(c.at(i, j), aik, b.at(k, j));
            }
        }
    }
    return c;
}

template <class R>
Mat<R> pad_to(const R& ring, const Mat<R>& a, int n) {
    Mat<R> p(ring, n, n);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) ring.assign(p.at(i, j), a.at(i, j));
    }
    return p;
}

template <class R>
Mat<R> block(const R& ring, const Mat<R>& a, int i0, int j0, int m) {
    Mat<R> b(ring, m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) ring.assign(b.at(i, j), a.at(i0 + i, j0 + j));
    return b;
}

template <class R>
Mat<R> mat_add(const R& ring, const Mat<R>& a, const Mat<R>& b) {
    Mat<R> c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) ring.add_into(c.at(i, j), b.at(i, j));
    return c;
}

template <class R>
Mat<R> mat_sub(const R& ring, const Mat<R>& a, const Mat<R>& b) {
    Mat<R> c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) ring.sub_into(c.at(i, j), b.at(i, j));
    return c;
}

template <class R>
Mat<R> strassen(const R& ring, const Mat<R>& a, const Mat<R>& b, int threshold) {
    int n = a.rows();
    if (n <= threshold) return mul_naive(ring, a, b);
    if (n & 1) {
        // Pad to even; the top-left block of the padded product is the answer.
        Mat<R> c = strassen(ring, pad_to(ring, a, n + 1), pad_to(ring, b, n + 1), threshold);
        return block(ring, c, 0, 0, n);
    }
    const int m = n / 2;
    Mat<R> a11 = block(ring, a, 0, 0, m), a12 = block(ring, a, 0, m, m);
    Mat<R> a21 = block(ring, a, m, 0, m), a22 = block(ring, a, m, m, m);
    Mat<R> b11 = block(ring, b, 0, 0, m), b12 = block(ring, b, 0, m, m);
    Mat<R> b21 = block(ring, b, m, 0, m), b22 = block(ring, b, m, m, m);

    Mat<R> m1 = strassen(ring, mat_add(ring, a11, a22), mat_add(ring, b11, b22), threshold);
    Mat<R> m2 = strassen(ring, mat_add(ring, a21, a22), b11, threshold);
    Mat<R> m3 = strassen(ring, a11, mat_sub(ring, b12, b22), threshold);
    Mat<R> m4 = strassen(ring, a22, mat_sub(ring, b21, b11), threshold);
    Mat<R> m5 = strassen(ring, mat_add(ring, a11, a12), b22, threshold);
    Mat<R> m6 = strassen(ring, mat_sub(ring, a21, a11), mat_add(ring, b11, b12), threshold);
    Mat<R> m7 = strassen(ring, mat_sub(ring, a12, a22), mat_add(ring, b21, b22), threshold);

    Mat<R> c(ring, n, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            // c11 = m1 + m4 - m5 + m7
            auto* c11 = c.at(i, j);
            ring.add_into(c11, m1.at(i, j));
            ring.add_into(c11, m4.at(i, j));
            ring.sub_into(c11, m5.at(i, j));
            ring.add_into(c11, m7.at(i, j));
            // c12 = m3 + m5
            auto* c12 = c.at(i, j + m);
            ring.add_into(c12, m3.at(i, j));
            ring.add_into(c12, m5.at(i, j));
            // c21 = m2 + m4
            auto* c21 = c.at(i + m, j);
            ring.add_into(c21, m2.at(i, j));
            ring.add_into(c21, m4.at(i, j));
            // c22 = m1 - m2 + m3 + m6
            auto* c22 = c.at(i + m, j + m);
            ring.add_into(c22, m1.at(i, j));
            ring.sub_into(c22, m2.at(i, j));
            ring.add_into(c22, m3.at(i, j));
            ring.add_into(c22, m6.at(i, j));
        }
    }
    return c;
}

}  // namespace detail

inline constexpr int kStrassenThreshold = 128;

/// Exact product over the scalar ring. Square products at or above the
/// threshold take the Strassen path; results are identical either way
/// (exact arithmetic, no rounding).
template <class R>
Mat<R> mat_mul(const R& ring, const Mat<R>& a, const Mat<R>& b,
               int strassen_threshold = kStrassenThreshold) {
    if (a.cols() != b.rows()) throw DimensionError("mat_mul: inner dimensions differ");
    if (strassen_threshold > 0 && a.rows() == a.cols() && b.rows() == b.cols() &&
        a.rows() >= strassen_threshold) {
        return detail::strassen(ring, a, b, strassen_threshold);
    }
    return detail::mul_naive(ring, a, b);
}

template <class R>
Mat<R> mat_transpose(const R& ring, const Mat<R>& a) {
    Mat<R> t(ring, a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) ring.assign(t.at(j, i), a.at(i, j));
    return t;
}

template <class R>
bool mat_equal(const R& ring, const Mat<R>& a, const Mat<R>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!ring.equal(a.at(i, j), b.at(i, j))) return false;
    return true;
}

/// Copy of the rows*cols submatrix selected by two index sets.
template <class R>
Mat<R> mat_submatrix(const R& ring, const Mat<R>& a, const IndexSet& rows, const IndexSet& cols) {
    Mat<R> s(ring, rows.size(), cols.size());
    for (int i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols.size(); ++j) ring.assign(s.at(i, j), a.at(rows[i], cols[j]));
    return s;
}

/// Inverse over a field by Gauss-Jordan elimination with the first invertible
/// pivot in each column. Throws SingularError if none exists.
template <class F>
Mat<F> mat_inv_field(const F& ring, const Mat<F>& m) {
    if (m.rows() != m.cols()) throw DimensionError("mat_inv_field: matrix not square");
    const int n = m.rows();
    const size_t w = ring.width();
    Mat<F> a = m;
    Mat<F> inv = Mat<F>::identity(ring, n);
    std::vector<typename F::Limb> pivinv(w), t(w);

    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (ring.try_inv(pivinv.data(), a.at(r, col))) {
                piv = r;
                break;
            }
        }
        if (piv < 0) throw SingularError("mat_inv_field: matrix is singular");
        a.swap_rows(piv, col);
        inv.swap_rows(piv, col);
        // Scale the pivot row to make the pivot 1.
        for (int j = 0; j < n; ++j) {
            ring.mul(t.data(), a.at(col, j), pivinv.data());
            ring.assign(a.at(col, j), t.data());
            ring.mul(t.data(), inv.at(col, j), pivinv.data());
            ring.assign(inv.at(col, j), t.data());
        }
        // Eliminate the column everywhere else.
        for (int i = 0; i < n; ++i) {
            if (i == col || ring.is_zero(a.at(i, col))) continue;
            std::vector<typename F::Limb> f(w);
            ring.assign(f.data(), a.at(i, col));
            for (int j = 0; j < n; ++j) {
                ring.mul(t.data(), f.data(), a.at(col, j));
                ring.sub_into(a.at(i, j), t.data());
                ring.mul(t.data(), f.data(), inv.at(col, j));
                ring.sub_into(inv.at(i, j), t.data());
            }
        }
    }
    return inv;
}

/// Inverse over the truncated polynomial ring by X-adic Newton lifting from
/// the field inverse of the constant-term matrix: Y <- Y(2I - MY), doubling
/// the number of correct coefficients per round.
template <class F>
Mat<PolyRing<F>> mat_inv_poly(const PolyRing<F>& ring, const Mat<PolyRing<F>>& m) {
    if (m.rows() != m.cols()) throw DimensionError("mat_inv_poly: matrix not square");
    const int n = m.rows();
    const F& base = ring.base();
    const size_t fw = base.width();

    Mat<F> m0(base, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) base.assign(m0.at(i, j), ring.coef(m.at(i, j), 0));
    Mat<F> y0 = mat_inv_field(base, m0);  // throws SingularError on singular M(0)

    Mat<PolyRing<F>> y(ring, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) base.assign(ring.coef(y.at(i, j), 0), y0.at(i, j));

    std::vector<typename F::Limb> two(fw);
    base.set_one(two.data());
    base.add_into(two.data(), two.data());

    for (size_t prec = 1; prec < ring.trunc_len(); prec *= 2) {
        Mat<PolyRing<F>> t = mat_mul(ring, m, y);
        // t <- 2I - t
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) ring.neg_into(t.at(i, j));
            base.add_into(ring.coef(t.at(i, i), 0), two.data());
        }
        y = mat_mul(ring, y, t);
    }
    return y;
}

}  // namespace dynshort

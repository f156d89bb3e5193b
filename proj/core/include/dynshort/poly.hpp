#pragma once

#include <cstddef>
#include <vector>

#include "dynshort/errors.hpp"
#include "dynshort/field.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Truncated polynomial ring F[X]/<X^len> as a ring context over a coefficient
// field context F. An element is len consecutive field elements, coefficient
// of X^k at offset k. Satisfies the same span-based concept as the field
// contexts, so Mat<PolyRing<F>> works unchanged.
// ---------------------------------------------------------------------------
template <class F>
class PolyRing {
public:
    using Field = F;
    using Limb = typename F::Limb;

    PolyRing(F base, size_t len) : base_(std::move(base)), len_(len) {
        if (len_ == 0) throw DimensionError("PolyRing: truncation length must be >= 1");
    }

    const F& base() const { return base_; }
    size_t trunc_len() const { return len_; }
    size_t width() const { return len_ * base_.width(); }

    /// Span of the coefficient of X^k inside element a.
    Limb* coef(Limb* a, size_t k) const { return a + k * base_.width(); }
    const Limb* coef(const Limb* a, size_t k) const { return a + k * base_.width(); }

    void clear(Limb* a) const {
        for (size_t k = 0; k < len_; ++k) base_.clear(coef(a, k));
    }
    void set_one(Limb* a) const {
        clear(a);
        base_.set_one(coef(a, 0));
    }
    void assign(Limb* dst, const Limb* src) const {
        for (size_t k = 0; k < len_; ++k) base_.assign(coef(dst, k), coef(src, k));
    }
    bool is_zero(const Limb* a) const {
        for (size_t k = 0; k < len_; ++k)
            if (!base_.is_zero(coef(a, k))) return false;
        return true;
    }
    bool equal(const Limb* a, const Limb* b) const {
        for (size_t k = 0; k < len_; ++k)
            if (!base_.equal(coef(a, k), coef(b, k))) return false;
        return true;
    }
    void add_into(Limb* a, const Limb* b) const {
        for (size_t k = 0; k < len_; ++k) base_.add_into(coef(a, k), coef(b, k));
    }
    void sub_into(Limb* a, const Limb* b) const {
        for (size_t k = 0; k < len_; ++k) base_.sub_into(coef(a, k), coef(b, k));
    }
    void neg_into(Limb* a) const {
        for (size_t k = 0; k < len_; ++k) base_.neg_into(coef(a, k));
    }

    void mul(Limb* r, const Limb* a, const Limb* b) const {
        clear(r);
        mul_add(r, a, b);
    }
    /// r += a*b, convolution truncated to degree < len. r must not alias a or b.
    void mul_add(Limb* r, const Limb* a, const Limb* b) const {
        for (size_t i = 0; i < len_; ++i) {
            const Limb* ai = coef(a, i);
            if (base_.is_zero(ai)) continue;
            for (size_t j = 0; i + j < len_; ++j) {
                base_.mul_add(coef(r, i + j), ai, coef(b, j));
            }
        }
    }

    /// r = a^{-1} by X-adic Newton iteration: b <- b*(2 - a*b), doubling the
    /// number of correct coefficients each round. Requires invertible a(0).
    bool try_inv(Limb* r, const Limb* a) const {
        const size_t fw = base_.width();
        std::vector<Limb> b(width()), t(width()), two(fw);
        for (size_t k = 0; k < len_; ++k) base_.clear(&b[k * fw]);
        if (!base_.try_inv(&b[0], coef(a, 0))) return false;
        base_.set_one(two.data());
        base_.add_into(two.data(), two.data());  // the field constant 2

        for (size_t prec = 1; prec < len_;) {
            size_t next = prec * 2 < len_ ? prec * 2 : len_;
            // t = a*b truncated to next coefficients.
            for (size_t k = 0; k < next; ++k) base_.clear(&t[k * fw]);
            conv_acc(t.data(), a, b.data(), next);
            // t = 2 - t
            for (size_t k = 0; k < next; ++k) base_.neg_into(&t[k * fw]);
            base_.add_into(&t[0], two.data());
            // b = b*t truncated to next coefficients (b has < prec terms, so
            // multiply into a fresh buffer then copy back).
            std::vector<Limb> nb(next * fw);
            for (size_t k = 0; k < next; ++k) base_.clear(&nb[k * fw]);
            conv_acc(nb.data(), b.data(), t.data(), next);
            for (size_t k = 0; k < next; ++k) base_.assign(&b[k * fw], &nb[k * fw]);
            prec = next;
        }
        assign(r, b.data());
        return true;
    }

    /// Smallest k with a nonzero coefficient of X^k, or -1 if a = 0.
    int min_nonzero_degree(const Limb* a) const {
        for (size_t k = 0; k < len_; ++k)
            if (!base_.is_zero(coef(a, k))) return static_cast<int>(k);
        return -1;
    }

private:
    // r[0..cut) += conv(a, b) truncated to cut coefficients.
    void conv_acc(Limb* r, const Limb* a, const Limb* b, size_t cut) const {
        const size_t fw = base_.width();
        for (size_t i = 0; i < cut && i < len_; ++i) {
            const Limb* ai = a + i * fw;
            if (base_.is_zero(ai)) continue;
            for (size_t j = 0; i + j < cut && j < len_; ++j) {
                base_.mul_add(r + (i + j) * fw, ai, b + j * fw);
            }
        }
    }

    F base_;
    size_t len_;
};

// ---------------------------------------------------------------------------
// TruncPoly: an owning polynomial value for the public API. The ring context
// that sizes and interprets it is passed to every operation; a value of the
// wrong length for the given context is a configuration error.
// ---------------------------------------------------------------------------
template <class F>
struct TruncPoly {
    std::vector<typename F::Limb> coeffs;
};

template <class F>
TruncPoly<F> poly_zero(const PolyRing<F>& ring) {
    TruncPoly<F> p;
    p.coeffs.resize(ring.width());
    ring.clear(p.coeffs.data());
    return p;
}

template <class F>
TruncPoly<F> poly_one(const PolyRing<F>& ring) {
    TruncPoly<F> p = poly_zero(ring);
    ring.set_one(p.coeffs.data());
    return p;
}

template <class F>
void poly_check(const PolyRing<F>& ring, const TruncPoly<F>& a) {
    if (a.coeffs.size() != ring.width()) {
        throw DimensionError("TruncPoly does not match the ring's truncation length");
    }
}

template <class F>
TruncPoly<F> poly_add(const PolyRing<F>& ring, const TruncPoly<F>& a, const TruncPoly<F>& b) {
    poly_check(ring, a);
    poly_check(ring, b);
    TruncPoly<F> r = a;
    ring.add_into(r.coeffs.data(), b.coeffs.data());
    return r;
}

template <class F>
TruncPoly<F> poly_mul(const PolyRing<F>& ring, const TruncPoly<F>& a, const TruncPoly<F>& b) {
    poly_check(ring, a);
    poly_check(ring, b);
    TruncPoly<F> r = poly_zero(ring);
    ring.mul(r.coeffs.data(), a.coeffs.data(), b.coeffs.data());
    return r;
}

template <class F>
TruncPoly<F> poly_inv_unitX(const PolyRing<F>& ring, const TruncPoly<F>& a) {
    poly_check(ring, a);
    TruncPoly<F> r = poly_zero(ring);
    if (!ring.try_inv(r.coeffs.data(), a.coeffs.data())) {
        throw SingularError("poly_inv_unitX: constant coefficient is not invertible");
    }
    return r;
}

/// Smallest degree with a nonzero coefficient, or -1 for the zero polynomial.
template <class F>
int min_nonzero_degree(const PolyRing<F>& ring, const TruncPoly<F>& a) {
    poly_check(ring, a);
    return ring.min_nonzero_degree(a.coeffs.data());
}

}  // namespace dynshort

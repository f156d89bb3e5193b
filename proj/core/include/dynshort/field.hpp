#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dynshort/errors.hpp"
#include "dynshort/rng.hpp"

namespace dynshort {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Ring context concept.
//
// All matrix and polynomial code below is generic over a "ring context" R:
//
//   typename R::Limb;              storage unit; one element = width() Limbs
//   size_t width() const;
//   void clear(Limb* a);                          a = 0
//   void set_one(Limb* a);
//   void assign(Limb* dst, const Limb* src);
//   bool is_zero(const Limb* a) const;
//   bool equal(const Limb* a, const Limb* b) const;
//   void add_into(Limb* a, const Limb* b);        a += b
//   void sub_into(Limb* a, const Limb* b);        a -= b
//   void neg_into(Limb* a);
//   void mul(Limb* r, const Limb* a, const Limb* b);      r = a*b   (no aliasing)
//   void mul_add(Limb* r, const Limb* a, const Limb* b);  r += a*b  (no aliasing)
//   bool try_inv(Limb* r, const Limb* a);         r = a^-1, false if no inverse
//
// Elements are kept in flat arrays, so a matrix of n*m elements is one
// contiguous allocation regardless of the ring. Field contexts additionally
// convert to/from canonical residues (from_u64 / to_u64).
// ---------------------------------------------------------------------------

/// Prime field with 64-bit Montgomery arithmetic. Requires odd p < 2^63.
class Fp64Ring {
public:
    using Limb = u64;

    explicit Fp64Ring(u64 p) : p_(p) {
        if (p < 3 || (p & 1) == 0) throw DimensionError("Fp64Ring: modulus must be odd and >= 3");
        if (p >= (u64{1} << 63)) throw DimensionError("Fp64Ring: modulus must be < 2^63");
        // ninv = -p^{-1} mod 2^64 by Newton iteration.
        u64 x = p;
        for (int i = 0; i < 5; ++i) x *= 2 - p * x;
        ninv_ = ~x + 1;  // = -x
        // r2 = 2^128 mod p, so from_u64(x) = redc(x * r2) = x * 2^64 mod p.
        u64 r = static_cast<u64>((u128{1} << 64) % p);
        r2_ = static_cast<u64>((u128{r} * r) % p);
        one_ = r;
    }

    u64 modulus() const { return p_; }
    size_t width() const { return 1; }

    void clear(Limb* a) const { *a = 0; }
    void set_one(Limb* a) const { *a = one_; }
    void assign(Limb* dst, const Limb* src) const { *dst = *src; }
    bool is_zero(const Limb* a) const { return *a == 0; }
    bool equal(const Limb* a, const Limb* b) const { return *a == *b; }

    void add_into(Limb* a, const Limb* b) const {
        u64 s = *a + *b;
        if (s >= p_) s -= p_;
        *a = s;
    }
    void sub_into(Limb* a, const Limb* b) const {
        *a = (*a >= *b) ? *a - *b : *a + p_ - *b;
    }
    void neg_into(Limb* a) const { *a = (*a == 0) ? 0 : p_ - *a; }

    void mul(Limb* r, const Limb* a, const Limb* b) const {
        *r = redc(static_cast<u128>(*a) * *b);
    }
    void mul_add(Limb* r, const Limb* a, const Limb* b) const {
        u64 t = redc(static_cast<u128>(*a) * *b);
        u64 s = *r + t;
        if (s >= p_) s -= p_;
        *r = s;
    }

    bool try_inv(Limb* r, const Limb* a) const {
        u64 v = to_u64(a);
        if (v == 0) return false;
        u64 inv = inv_mod(v, p_);
        from_u64(r, inv);
        return true;
    }

    void from_u64(Limb* r, u64 v) const { *r = redc(static_cast<u128>(v % p_) * r2_); }
    u64 to_u64(const Limb* a) const { return redc(static_cast<u128>(*a)); }

private:
    u64 redc(u128 t) const {
        u64 m = static_cast<u64>(t) * ninv_;
        // t + m*p < 2^126 + 2^127 < 2^128 for p < 2^63 and t a product of residues.
        u64 res = static_cast<u64>((t + static_cast<u128>(m) * p_) >> 64);
        if (res >= p_) res -= p_;
        return res;
    }

    static u64 inv_mod(u64 a, u64 p) {
        // Extended Euclid over signed 128-bit to dodge overflow.
        __int128 t = 0, new_t = 1;
        __int128 r = p, new_r = a;
        while (new_r != 0) {
            __int128 q = r / new_r;
            __int128 tmp = t - q * new_t;
            t = new_t; new_t = tmp;
            tmp = r - q * new_r;
            r = new_r; new_r = tmp;
        }
        if (t < 0) t += p;
        return static_cast<u64>(t);
    }

    u64 p_, ninv_, r2_, one_;
};

/// Prime field with 128-bit Montgomery arithmetic. Requires odd p < 2^126.
/// Used by the deterministic bounded-distance mode when n^h needs 62..125 bits.
class Fp128Ring {
public:
    using Limb = u128;

    explicit Fp128Ring(const mpz_class& p);

    const mpz_class& modulus() const { return p_mpz_; }
    size_t width() const { return 1; }

    void clear(Limb* a) const { *a = 0; }
    void set_one(Limb* a) const { *a = one_; }
    void assign(Limb* dst, const Limb* src) const { *dst = *src; }
    bool is_zero(const Limb* a) const { return *a == 0; }
    bool equal(const Limb* a, const Limb* b) const { return *a == *b; }

    void add_into(Limb* a, const Limb* b) const {
        u128 s = *a + *b;
        if (s >= p_) s -= p_;
        *a = s;
    }
    void sub_into(Limb* a, const Limb* b) const {
        *a = (*a >= *b) ? *a - *b : *a + p_ - *b;
    }
    void neg_into(Limb* a) const { *a = (*a == 0) ? u128{0} : p_ - *a; }

    void mul(Limb* r, const Limb* a, const Limb* b) const { *r = mont_mul(*a, *b); }
    void mul_add(Limb* r, const Limb* a, const Limb* b) const {
        u128 t = mont_mul(*a, *b);
        u128 s = *r + t;
        if (s >= p_) s -= p_;
        *r = s;
    }

    bool try_inv(Limb* r, const Limb* a) const;

    void from_u128(Limb* r, u128 v) const { *r = mont_mul(v % p_, r2_); }
    u128 to_u128(const Limb* a) const { return redc(u256{*a, 0}); }
    void from_u64(Limb* r, u64 v) const { from_u128(r, v); }
    u64 to_u64(const Limb* a) const { return static_cast<u64>(to_u128(a)); }

private:
    struct u256 {
        u128 lo, hi;
    };

    static u256 mul_full(u128 a, u128 b) {
        const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
        const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
        const u128 p00 = static_cast<u128>(a0) * b0;
        const u128 p01 = static_cast<u128>(a0) * b1;
        const u128 p10 = static_cast<u128>(a1) * b0;
        const u128 p11 = static_cast<u128>(a1) * b1;
        u128 mid = p01 + p10;
        u128 carry_mid = (mid < p01) ? (u128{1} << 64) : 0;  // overflow of the mid sum
        u128 lo = p00 + (mid << 64);
        u128 carry_lo = (lo < p00) ? 1 : 0;
        u128 hi = p11 + (mid >> 64) + carry_mid + carry_lo;
        return {lo, hi};
    }

    u128 redc(u256 t) const {
        u128 m = t.lo * ninv_;  // low-128 product is exactly what we need
        u256 mp = mul_full(m, p_);
        // s = t + mp; s.lo == 0 by construction, result = s >> 128.
        u128 lo = t.lo + mp.lo;
        u128 carry = (lo < t.lo) ? 1 : 0;
        u128 res = t.hi + mp.hi + carry;
        if (res >= p_) res -= p_;
        return res;
    }

    u128 mont_mul(u128 a, u128 b) const { return redc(mul_full(a, b)); }

    u128 p_, ninv_, r2_, one_;
    mpz_class p_mpz_;
};

/// Prime field over GMP integers; the fallback for arbitrarily large moduli.
/// Not thread-safe (scratch temporaries); all structures here are single-writer.
class FpBigRing {
public:
    using Limb = mpz_class;

    explicit FpBigRing(mpz_class p) : p_(std::move(p)) {
        if (p_ < 3) throw DimensionError("FpBigRing: modulus must be >= 3");
    }

    const mpz_class& modulus() const { return p_; }
    size_t width() const { return 1; }

    void clear(Limb* a) const { *a = 0; }
    void set_one(Limb* a) const { *a = 1; }
    void assign(Limb* dst, const Limb* src) const { *dst = *src; }
    bool is_zero(const Limb* a) const { return *a == 0; }
    bool equal(const Limb* a, const Limb* b) const { return *a == *b; }

    void add_into(Limb* a, const Limb* b) const {
        *a += *b;
        if (*a >= p_) *a -= p_;
    }
    void sub_into(Limb* a, const Limb* b) const {
        *a -= *b;
        if (*a < 0) *a += p_;
    }
    void neg_into(Limb* a) const {
        if (*a != 0) *a = p_ - *a;
    }
    void mul(Limb* r, const Limb* a, const Limb* b) const {
        mpz_mul(scratch_.get_mpz_t(), a->get_mpz_t(), b->get_mpz_t());
        mpz_tdiv_r(r->get_mpz_t(), scratch_.get_mpz_t(), p_.get_mpz_t());
    }
    void mul_add(Limb* r, const Limb* a, const Limb* b) const {
        mpz_addmul(r->get_mpz_t(), a->get_mpz_t(), b->get_mpz_t());
        mpz_tdiv_r(r->get_mpz_t(), r->get_mpz_t(), p_.get_mpz_t());
    }
    bool try_inv(Limb* r, const Limb* a) const {
        return mpz_invert(r->get_mpz_t(), a->get_mpz_t(), p_.get_mpz_t()) != 0;
    }

    void from_mpz(Limb* r, const mpz_class& v) const {
        mpz_mod(r->get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t());
    }
    mpz_class to_mpz(const Limb* a) const { return *a; }
    void from_u64(Limb* r, u64 v) const {
        mpz_import(r->get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
        mpz_mod(r->get_mpz_t(), r->get_mpz_t(), p_.get_mpz_t());
    }
    u64 to_u64(const Limb* a) const {
        u64 out = 0;
        mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, a->get_mpz_t());
        return out;
    }

private:
    mpz_class p_;
    mutable mpz_class scratch_;
};

// ---------------------------------------------------------------------------
// Primes and field configuration.
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin for 64-bit inputs (fixed witness set).
bool is_prime_u64(u64 n);

/// Smallest prime strictly greater than lo. Uses the deterministic 64-bit test
/// when the candidate fits, GMP's BPSW+MR test (40 reps) beyond that.
mpz_class next_prime_above(const mpz_class& lo);

/// The deterministic bounded-distance modulus: a prime in (n^h, 2*n^h].
/// Walk counts of length <= h are < n^h, so they never wrap mod p.
mpz_class bounded_walk_prime(int n, int h);

/// A uniform-ish 62-bit prime from the given PRNG (top bit of 62 set).
u64 random_prime_62(Rng& rng);

/// How the bounded-distance structures pick their coefficient field.
struct FieldConfig {
    enum class Mode { deterministic, randomized };

    Mode mode = Mode::randomized;
    /// Randomized mode: number of independent prime copies; 0 = ceil(3*ln n).
    int copies = 0;
    std::uint64_t seed = 1;
    /// Deterministic mode: optional explicit modulus (decimal); empty = derive
    /// a prime in (n^h, 2*n^h].
    std::string modulus;

    static int default_copies(int n) {
        int c = static_cast<int>(std::ceil(3.0 * std::log(std::max(n, 2))));
        return c < 1 ? 1 : c;
    }
    int effective_copies(int n) const { return copies > 0 ? copies : default_copies(n); }

    static FieldConfig deterministic() {
        FieldConfig f;
        f.mode = Mode::deterministic;
        return f;
    }
    static FieldConfig randomized(std::uint64_t seed, int copies = 0) {
        FieldConfig f;
        f.mode = Mode::randomized;
        f.seed = seed;
        f.copies = copies;
        return f;
    }
};

}  // namespace dynshort

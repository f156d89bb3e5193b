#include "dynshort/field.hpp"

namespace dynshort {

namespace {

mpz_class u128_to_mpz(u128 v) {
    mpz_class hi = static_cast<u64>(v >> 64);
    mpz_class r = hi << 64;
    r += static_cast<u64>(v);
    return r;
}

u128 mpz_to_u128(const mpz_class& v) {
    mpz_class hi = v >> 64;
    mpz_class lo = v - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

u64 pow_mod_u64(u64 base, u64 exp, u64 mod) {
    u128 result = 1, b = base % mod;
    while (exp > 0) {
        if (exp & 1) result = result * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<u64>(result);
}

}  // namespace

Fp128Ring::Fp128Ring(const mpz_class& p) : p_mpz_(p) {
    if (p < 3 || mpz_even_p(p.get_mpz_t())) {
        throw DimensionError("Fp128Ring: modulus must be odd and >= 3");
    }
    if (mpz_sizeinbase(p.get_mpz_t(), 2) > 126) {
        throw DimensionError("Fp128Ring: modulus must be < 2^126");
    }
    p_ = mpz_to_u128(p);
    // ninv = -p^{-1} mod 2^128 by Newton iteration (doubles correct bits each step).
    u128 x = p_;
    for (int i = 0; i < 7; ++i) x *= 2 - p_ * x;
    ninv_ = ~x + 1;
    // r2 = 2^256 mod p, one = 2^128 mod p; both via GMP once at construction.
    mpz_class r2 = (mpz_class(1) << 256) % p;
    r2_ = mpz_to_u128(r2);
    mpz_class one = (mpz_class(1) << 128) % p;
    one_ = mpz_to_u128(one);
}

bool Fp128Ring::try_inv(Limb* r, const Limb* a) const {
    u128 v = to_u128(a);
    if (v == 0) return false;
    // Extended Euclid in GMP; inversions are rare enough that this is fine.
    mpz_class inv;
    mpz_class av = u128_to_mpz(v);
    if (mpz_invert(inv.get_mpz_t(), av.get_mpz_t(), p_mpz_.get_mpz_t()) == 0) return false;
    from_u128(r, mpz_to_u128(inv));
    return true;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set is deterministic for all n < 3.3 * 10^24 > 2^64.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = static_cast<u64>(static_cast<u128>(x) * x % n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

mpz_class next_prime_above(const mpz_class& lo) {
    mpz_class c = lo + 1;
    if (c < 3) c = 3;
    if (mpz_even_p(c.get_mpz_t())) ++c;
    const mpz_class u64_max = (mpz_class(1) << 64) - 1;
    while (true) {
        if (c <= u64_max) {
            if (is_prime_u64(static_cast<u64>(mpz_to_u128(c)))) return c;
        } else if (mpz_probab_prime_p(c.get_mpz_t(), 40) > 0) {
            return c;
        }
        c += 2;
    }
}

mpz_class bounded_walk_prime(int n, int h) {
    if (n < 2) n = 2;
    mpz_class lo;
    mpz_ui_pow_ui(lo.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(h));
    // Bertrand: there is a prime in (n^h, 2*n^h].
    return next_prime_above(lo);
}

u64 random_prime_62(Rng& rng) {
    while (true) {
        u64 c = (rng.next() & ((u64{1} << 61) - 1)) | (u64{1} << 61) | 1;
        if (is_prime_u64(c)) return c;
    }
}

}  // namespace dynshort

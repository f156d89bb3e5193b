#include "doctest.h"

#include <gmpxx.h>

#include "dynshort/field.hpp"
#include "dynshort/rng.hpp"
#include "reference.hpp"

using namespace dynshort;

TEST_CASE("Fp64Ring roundtrip and arithmetic against plain modular reference") {
    for (u64 p : {7ull, 1009ull, 9223372036854775783ull /* largest prime < 2^63 */}) {
        Fp64Ring f(p);
        Rng rng(42);
        for (int iter = 0; iter < 500; ++iter) {
            u64 av = rng.next() % p, bv = rng.next() % p;
            u64 a, b, r;
            f.from_u64(&a, av);
            f.from_u64(&b, bv);
            CHECK(f.to_u64(&a) == av);

            f.assign(&r, &a);
            f.add_into(&r, &b);
            CHECK(f.to_u64(&r) == refimpl::add_mod(av, bv, p));

            f.assign(&r, &a);
            f.sub_into(&r, &b);
            CHECK(f.to_u64(&r) == refimpl::sub_mod(av, bv, p));

            f.mul(&r, &a, &b);
            CHECK(f.to_u64(&r) == refimpl::mul_mod(av, bv, p));

            f.assign(&r, &a);
            f.neg_into(&r);
            CHECK(f.to_u64(&r) == refimpl::sub_mod(0, av, p));

            if (av != 0) {
                REQUIRE(f.try_inv(&r, &a));
                CHECK(f.to_u64(&r) == refimpl::inv_mod(av, p));
            }
        }
    }
}

TEST_CASE("Fp64Ring edge values near the modulus") {
    u64 p = 9223372036854775783ull;
    Fp64Ring f(p);
    u64 a, r;
    f.from_u64(&a, p - 1);
    f.mul(&r, &a, &a);
    CHECK(f.to_u64(&r) == 1);  // (-1)^2 = 1
    f.from_u64(&a, 0);
    CHECK(f.is_zero(&a));
    CHECK_FALSE(f.try_inv(&r, &a));
}

TEST_CASE("Fp64Ring mul_add accumulates") {
    Fp64Ring f(1009);
    u64 acc, a, b;
    f.from_u64(&acc, 100);
    f.from_u64(&a, 30);
    f.from_u64(&b, 40);
    f.mul_add(&acc, &a, &b);  // 100 + 1200 = 1300 = 291 mod 1009
    CHECK(f.to_u64(&acc) == 291);
}

TEST_CASE("Fp128Ring matches GMP reference arithmetic") {
    // A prime needing more than 64 bits: search above 2^100.
    mpz_class p = next_prime_above(mpz_class(1) << 100);
    Fp128Ring f(p);
    Rng rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        mpz_class av = (mpz_class(rng.next()) << 64 | rng.next()) % p;
        mpz_class bv = (mpz_class(rng.next()) << 64 | rng.next()) % p;
        auto to128 = [](const mpz_class& v) {
            mpz_class hi = v >> 64, lo = v - ((v >> 64) << 64);
            return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
        };
        auto tompz = [](u128 v) {
            mpz_class r = static_cast<u64>(v >> 64);
            r <<= 64;
            r += static_cast<u64>(v);
            return r;
        };
        u128 a, b, r;
        f.from_u128(&a, to128(av));
        f.from_u128(&b, to128(bv));
        CHECK(tompz(f.to_u128(&a)) == av);

        f.mul(&r, &a, &b);
        CHECK(tompz(f.to_u128(&r)) == av * bv % p);

        f.assign(&r, &a);
        f.add_into(&r, &b);
        CHECK(tompz(f.to_u128(&r)) == (av + bv) % p);

        f.assign(&r, &a);
        f.sub_into(&r, &b);
        CHECK(tompz(f.to_u128(&r)) == ((av - bv) % p + p) % p);

        if (av != 0) {
            REQUIRE(f.try_inv(&r, &a));
            mpz_class inv;
            mpz_invert(inv.get_mpz_t(), av.get_mpz_t(), p.get_mpz_t());
            CHECK(tompz(f.to_u128(&r)) == inv);
        }
    }
}

TEST_CASE("Fp128Ring near-maximal modulus") {
    mpz_class p = next_prime_above((mpz_class(1) << 126) - 1000000);
    REQUIRE(mpz_sizeinbase(p.get_mpz_t(), 2) <= 126);
    Fp128Ring f(p);
    u128 a, r;
    u64 one = 1;
    // (p-1)^2 = 1 mod p
    mpz_class pm1 = p - 1;
    mpz_class hi = pm1 >> 64, lo = pm1 - ((pm1 >> 64) << 64);
    u128 v = (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
    f.from_u128(&a, v);
    f.mul(&r, &a, &a);
    CHECK(f.to_u128(&r) == u128{one});
}

TEST_CASE("FpBigRing basic operations") {
    mpz_class p = next_prime_above(mpz_class("1000000000000000000000000000000000000"));
    FpBigRing f(p);
    mpz_class a, b, r;
    f.from_mpz(&a, mpz_class("123456789012345678901234567890"));
    f.from_mpz(&b, p - 1);
    f.mul(&r, &a, &b);  // a * (p-1) = -a
    mpz_class expect = (p - mpz_class("123456789012345678901234567890")) % p;
    CHECK(f.to_mpz(&r) == expect);
    REQUIRE(f.try_inv(&r, &a));
    mpz_class prod;
    f.mul(&prod, &r, &a);
    CHECK(f.to_mpz(&prod) == 1);
    f.from_u64(&r, 12345);
    CHECK(f.to_u64(&r) == 12345);
}

TEST_CASE("deterministic 64-bit primality") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(3));
    CHECK(is_prime_u64(1009));
    CHECK(is_prime_u64((u64{1} << 61) - 1));  // Mersenne prime 2^61-1
    CHECK(is_prime_u64(9223372036854775783ull));
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(561));    // Carmichael
    CHECK_FALSE(is_prime_u64(1007));   // 19*53
    CHECK_FALSE(is_prime_u64((u64{1} << 62) + 2));
}

TEST_CASE("prime search for the bounded-walk modulus") {
    CHECK(next_prime_above(10) == 11);
    CHECK(next_prime_above(2) == 3);
    // p in (n^h, 2 n^h] for assorted sizes, crossing the word boundary.
    struct Case {
        int n, h;
    } cases[] = {{2, 3}, {40, 4}, {60, 8}, {100, 18}};
    for (auto [n, h] : cases) {
        mpz_class lo;
        mpz_ui_pow_ui(lo.get_mpz_t(), n, h);
        mpz_class p = bounded_walk_prime(n, h);
        CHECK(p > lo);
        CHECK(p <= 2 * lo);
        CHECK(mpz_probab_prime_p(p.get_mpz_t(), 30) > 0);
    }
}

TEST_CASE("random 62-bit primes are prime, sized, and seed-deterministic") {
    Rng rng(99);
    for (int i = 0; i < 10; ++i) {
        u64 p = random_prime_62(rng);
        CHECK(is_prime_u64(p));
        CHECK((p >> 61) == 1);  // exactly 62 bits
    }
    Rng r1(5), r2(5);
    CHECK(random_prime_62(r1) == random_prime_62(r2));
}

TEST_CASE("field config defaults") {
    CHECK(FieldConfig::default_copies(100) == 14);  // ceil(3 ln 100) = ceil(13.8)
    CHECK(FieldConfig::default_copies(2) >= 1);
    FieldConfig det = FieldConfig::deterministic();
    CHECK(det.mode == FieldConfig::Mode::deterministic);
    FieldConfig rnd = FieldConfig::randomized(7, 3);
    CHECK(rnd.effective_copies(1000) == 3);
    CHECK(FieldConfig::randomized(7).effective_copies(1000) == 21);  // ceil(3 ln 1000)
}

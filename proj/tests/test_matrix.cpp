#include "doctest.h"

#include <vector>

#include "dynshort/field.hpp"
#include "dynshort/matrix.hpp"
#include "dynshort/poly.hpp"
#include "dynshort/rng.hpp"
#include "reference.hpp"

using namespace dynshort;

namespace {

Mat<Fp64Ring> make_mat(const Fp64Ring& f, const refimpl::MatU& vals) {
    Mat<Fp64Ring> m(f, static_cast<int>(vals.size()), static_cast<int>(vals[0].size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) f.from_u64(m.at(i, j), vals[i][j]);
    return m;
}

refimpl::MatU read_mat(const Fp64Ring& f, const Mat<Fp64Ring>& m) {
    refimpl::MatU vals(m.rows(), std::vector<u64>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) vals[i][j] = f.to_u64(m.at(i, j));
    return vals;
}

refimpl::MatU random_mat(Rng& rng, int n, int m, u64 p) {
    refimpl::MatU vals(n, std::vector<u64>(m));
    for (auto& row : vals)
        for (auto& v : row) v = rng.next() % p;
    return vals;
}

}  // namespace

TEST_CASE("IndexSet ordering, membership, rank") {
    IndexSet s(std::vector<int>{5, 1, 9, 1});
    CHECK(s.size() == 3);
    CHECK(s.items() == std::vector<int>{1, 5, 9});
    CHECK(s.contains(5));
    CHECK_FALSE(s.contains(2));
    CHECK(s.rank(9) == 2);
    CHECK(s.rank(2) == -1);
    CHECK(s.add(2));
    CHECK_FALSE(s.add(2));
    CHECK(s.items() == std::vector<int>{1, 2, 5, 9});
    CHECK(s.remove(5));
    CHECK_FALSE(s.remove(5));
    CHECK(s.items() == std::vector<int>{1, 2, 9});
    CHECK(IndexSet::full(3).items() == std::vector<int>{0, 1, 2});
}

TEST_CASE("mat_mul identity and nilpotent frozen examples") {
    Fp64Ring f(7);
    Rng rng(1);
    auto a = make_mat(f, random_mat(rng, 4, 4, 7));
    auto id = Mat<Fp64Ring>::identity(f, 4);
    CHECK(mat_equal(f, mat_mul(f, a, id), a));

    auto nil = make_mat(f, {{0, 1}, {0, 0}});
    auto sq = mat_mul(f, nil, nil);
    CHECK(read_mat(f, sq) == refimpl::MatU{{0, 0}, {0, 0}});
}

TEST_CASE("mat_mul matches triple-loop reference") {
    Fp64Ring f(7);
    Rng rng(2);
    for (int iter = 0; iter < 30; ++iter) {
        auto av = random_mat(rng, 5, 5, 7);
        auto bv = random_mat(rng, 5, 5, 7);
        auto c = mat_mul(f, make_mat(f, av), make_mat(f, bv));
        CHECK(read_mat(f, c) == refimpl::mat_mul_mod(av, bv, 7));
    }
    // rectangular shapes
    Fp64Ring g(1009);
    for (int iter = 0; iter < 20; ++iter) {
        auto av = random_mat(rng, 3, 7, 1009);
        auto bv = random_mat(rng, 7, 2, 1009);
        auto c = mat_mul(g, make_mat(g, av), make_mat(g, bv));
        CHECK(read_mat(g, c) == refimpl::mat_mul_mod(av, bv, 1009));
    }
    CHECK_THROWS_AS(mat_mul(f, Mat<Fp64Ring>(f, 2, 3), Mat<Fp64Ring>(f, 2, 3)), DimensionError);
}

TEST_CASE("mat_mul associativity on random triples") {
    Fp64Ring f(1009);
    Rng rng(3);
    for (int iter = 0; iter < 25; ++iter) {
        auto a = make_mat(f, random_mat(rng, 4, 6, 1009));
        auto b = make_mat(f, random_mat(rng, 6, 3, 1009));
        auto c = make_mat(f, random_mat(rng, 3, 5, 1009));
        CHECK(mat_equal(f, mat_mul(f, mat_mul(f, a, b), c), mat_mul(f, a, mat_mul(f, b, c))));
    }
}

TEST_CASE("Strassen path is bit-identical to the naive path") {
    Fp64Ring f(9223372036854775783ull);
    Rng rng(4);
    int instances = 0;
    for (int iter = 0; iter < 100; ++iter) {
        int n = 3 + static_cast<int>(rng.below(30));  // odd and even sizes
        auto av = random_mat(rng, n, n, 9223372036854775783ull);
        auto bv = random_mat(rng, n, n, 9223372036854775783ull);
        auto a = make_mat(f, av), b = make_mat(f, bv);
        auto naive = mat_mul(f, a, b, /*strassen_threshold=*/0);
        auto fast = mat_mul(f, a, b, /*strassen_threshold=*/2);
        CHECK(mat_equal(f, naive, fast));
        ++instances;
    }
    CHECK(instances == 100);
}

TEST_CASE("mat_inv_field frozen examples") {
    Fp64Ring f(7);
    auto id = Mat<Fp64Ring>::identity(f, 3);
    CHECK(mat_equal(f, mat_inv_field(f, id), id));

    auto d = make_mat(f, {{2, 0}, {0, 3}});
    CHECK(read_mat(f, mat_inv_field(f, d)) == refimpl::MatU{{4, 0}, {0, 5}});

    auto sing = make_mat(f, {{1, 2}, {2, 4}});
    CHECK_THROWS_AS(mat_inv_field(f, sing), SingularError);
    CHECK_THROWS_AS(mat_inv_field(f, Mat<Fp64Ring>(f, 2, 3)), DimensionError);
}

TEST_CASE("mat_inv_field matches Gauss-Jordan reference on random instances") {
    // 1007 = 19*53 is not prime; 1009 is the prime used throughout.
    Fp64Ring f(1009);
    Rng rng(5);
    int inverted = 0;
    while (inverted < 20) {
        auto av = random_mat(rng, 8, 8, 1009);
        auto ref = refimpl::mat_inv_mod(av, 1009);
        if (ref.empty()) continue;  // singular Sample, skip
        auto inv = mat_inv_field(f, make_mat(f, av));
        CHECK(read_mat(f, inv) == ref);
        auto prod = mat_mul(f, make_mat(f, av), inv);
        CHECK(mat_equal(f, prod, Mat<Fp64Ring>::identity(f, 8)));
        ++inverted;
    }
}

TEST_CASE("mat_inv_poly identity and single-edge example") {
    PolyRing<Fp64Ring> ring(Fp64Ring(7), 3);
    auto id = Mat<PolyRing<Fp64Ring>>::identity(ring, 2);
    CHECK(mat_equal(ring, mat_inv_poly(ring, id), id));

    // M = I - X*A for a single directed edge 0->1: inverse is I + X*A.
    Mat<PolyRing<Fp64Ring>> m = id;
    ring.base().from_u64(ring.coef(m.at(0, 1), 1), 1);
    ring.base().neg_into(ring.coef(m.at(0, 1), 1));
    auto inv = mat_inv_poly(ring, m);
    auto expect = id;
    ring.base().from_u64(ring.coef(expect.at(0, 1), 1), 1);
    CHECK(mat_equal(ring, inv, expect));
}

TEST_CASE("mat_inv_poly on the directed 3-cycle counts closed walks") {
    // (I - XA)^{-1} entries are generating functions of walk counts; on the
    // 3-cycle the (0,0) entry counts closed walks: 1, 0, 0, 1 for h=4.
    PolyRing<Fp64Ring> ring(Fp64Ring(1009), 4);
    auto m = Mat<PolyRing<Fp64Ring>>::identity(ring, 3);
    auto set_minus_x = [&](int i, int j) {
        ring.base().from_u64(ring.coef(m.at(i, j), 1), 1);
        ring.base().neg_into(ring.coef(m.at(i, j), 1));
    };
    set_minus_x(0, 1);
    set_minus_x(1, 2);
    set_minus_x(2, 0);
    auto inv = mat_inv_poly(ring, m);
    std::vector<u64> got(4);
    for (size_t k = 0; k < 4; ++k) got[k] = ring.base().to_u64(ring.coef(inv.at(0, 0), k));
    CHECK(got == std::vector<u64>{1, 0, 0, 1});
    // And the product is exactly the identity in the truncated ring.
    CHECK(mat_equal(ring, mat_mul(ring, m, inv), Mat<PolyRing<Fp64Ring>>::identity(ring, 3)));
}

TEST_CASE("mat_inv_poly inverse property on random unit-constant matrices") {
    PolyRing<Fp64Ring> ring(Fp64Ring(1009), 5);
    Rng rng(6);
    int inverted = 0;
    while (inverted < 10) {
        int n = 4;
        Mat<PolyRing<Fp64Ring>> m(ring, n, n);
        refimpl::MatU c0 = random_mat(rng, n, n, 1009);
        if (refimpl::mat_inv_mod(c0, 1009).empty()) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ring.base().from_u64(ring.coef(m.at(i, j), 0), c0[i][j]);
                for (size_t k = 1; k < 5; ++k)
                    ring.base().from_u64(ring.coef(m.at(i, j), k), rng.next() % 1009);
            }
        auto inv = mat_inv_poly(ring, m);
        CHECK(mat_equal(ring, mat_mul(ring, m, inv), Mat<PolyRing<Fp64Ring>>::identity(ring, n)));
        ++inverted;
    }

    // Singular constant term throws.
    Mat<PolyRing<Fp64Ring>> z(ring, 2, 2);
    CHECK_THROWS_AS(mat_inv_poly(ring, z), SingularError);
}

TEST_CASE("transpose and submatrix extraction") {
    Fp64Ring f(7);
    auto a = make_mat(f, {{1, 2, 3}, {4, 5, 6}});
    CHECK(read_mat(f, mat_transpose(f, a)) == refimpl::MatU{{1, 4}, {2, 5}, {3, 6}});

    auto big = make_mat(f, {{0, 1, 2, 3}, {4, 5, 6, 0}, {1, 2, 3, 4}});
    IndexSet rows(std::vector<int>{0, 2}), cols(std::vector<int>{1, 3});
    CHECK(read_mat(f, mat_submatrix(f, big, rows, cols)) == refimpl::MatU{{1, 3}, {2, 4}});
}

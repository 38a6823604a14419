#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "monolayer/quaternion.hpp"
#include "testutil.hpp"

using namespace monolayer;

namespace {

Quaternion random_quaternion(Rng& rng) {
    return {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0)};
}

double qdist(const Quaternion& p, const Quaternion& q) {
    return std::max({std::abs(p.a - q.a), std::abs(p.b - q.b),
                     std::abs(p.c - q.c), std::abs(p.d - q.d)});
}

}  // namespace

TEST_CASE("basis products follow the hamilton table", "[quaternion]") {
    const Quaternion one{1, 0, 0, 0}, i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
    const Quaternion minus_one{-1, 0, 0, 0};

    REQUIRE(qmul(i, i) == minus_one);
    REQUIRE(qmul(j, j) == minus_one);
    REQUIRE(qmul(k, k) == minus_one);
    REQUIRE(qmul(i, j) == k);
    REQUIRE(qmul(j, k) == i);
    REQUIRE(qmul(k, i) == j);
    REQUIRE(qmul(j, i) == qscale(-1.0, k));
    REQUIRE(qmul(k, j) == qscale(-1.0, i));
    REQUIRE(qmul(i, k) == qscale(-1.0, j));
    REQUIRE(qmul(qmul(i, j), k) == minus_one);
    REQUIRE(qmul(one, i) == i);
    REQUIRE(qmul(i, one) == i);
}

TEST_CASE("a worked integer product", "[quaternion]") {
    const Quaternion p{1, 2, 3, 4}, q{5, 6, 7, 8};
    const Quaternion want{-60, 12, 30, 24};
    REQUIRE(qmul(p, q) == want);
    const Quaternion want_rev{-60, 20, 14, 32};
    REQUIRE(qmul(q, p) == want_rev);
}

TEST_CASE("addition and scaling are componentwise", "[quaternion]") {
    const Quaternion p{1, -2, 3, -4};
    REQUIRE(qadd(p, qscale(-1.0, p)) == Quaternion{0, 0, 0, 0});
    REQUIRE(qscale(2.0, p) == Quaternion{2, -4, 6, -8});
}

TEST_CASE("modulus is multiplicative and conjugation reverses products",
          "[quaternion]") {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        REQUIRE(std::abs(qmod(qmul(p, q)) - qmod(p) * qmod(q)) < 1e-12);
        REQUIRE(qdist(qconj(qmul(p, q)), qmul(qconj(q), qconj(p))) < 1e-12);
    }
}

TEST_CASE("multiplication is associative", "[quaternion]") {
    Rng rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        const Quaternion r = random_quaternion(rng);
        REQUIRE(qdist(qmul(qmul(p, q), r), qmul(p, qmul(q, r))) < 1e-12);
    }
}

TEST_CASE("conjugate product gives the squared modulus", "[quaternion]") {
    const Quaternion q{1, 1, 1, 1};
    REQUIRE(qmod2(q) == 4.0);
    REQUIRE(qmod(q) == 2.0);
    const Quaternion qq = qmul(q, qconj(q));
    REQUIRE(qq == Quaternion{4, 0, 0, 0});
}

TEST_CASE("inverse multiplies to one", "[quaternion]") {
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        Quaternion q = random_quaternion(rng);
        if (qmod2(q) < 1e-6) q.a += 1.0;
        const Quaternion prod = qmul(q, qinv(q));
        REQUIRE(qdist(prod, Quaternion{1, 0, 0, 0}) < 1e-13);
    }
    REQUIRE_THROWS_AS(qinv(Quaternion{0, 0, 0, 0}), std::domain_error);
}

TEST_CASE("pixel embedding carries the response with zero k part", "[quaternion]") {
    const Image img = testutil::random_image(9, 11, 1, 55);
    const MonogenicResponse m = monogenic_transform(img, m6_init());
    const Image amp = local_amplitude(m);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Quaternion q = monogenic_quaternion(m, y, x);
            REQUIRE(q.a == m.i_prime.at(y, x));
            REQUIRE(q.b == m.i1.at(y, x));
            REQUIRE(q.c == m.i2.at(y, x));
            REQUIRE(q.d == 0.0);
            REQUIRE(qmod(q) == amp.at(y, x));
        }
    REQUIRE_THROWS_AS(monogenic_quaternion(m, -1, 0), std::out_of_range);
    REQUIRE_THROWS_AS(monogenic_quaternion(m, 0, 11), std::out_of_range);
}

// Copyright 2026 The obsrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>

#include "obsrank/matrix.hpp"
#include "obsrank/series.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace obsrank;
using namespace obsrank::testing;

namespace {

std::vector<std::uint64_t> coeffs(const TruncatedSeries& s) { return {s.coeffs().begin(), s.coeffs().end()}; }

std::vector<std::vector<std::int64_t>> as_rows(const FieldMatrix& m) {
    std::vector<std::vector<std::int64_t>> rows(m.rows(), std::vector<std::int64_t>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = static_cast<std::int64_t>(m(r, c));
    return rows;
}

} // namespace

TEST_CASE("prime field basics") {
    PrimeField f;
    CHECK(f.modulus() == kDefaultPrime);
    CHECK(is_prime(kDefaultPrime));
    CHECK_FALSE(is_prime(kDefaultPrime - 2));
    CHECK(f.mul(f.inv(12345), 12345) == 1);
    CHECK(f.from_signed(-1) == kDefaultPrime - 1);
    CHECK_THROWS_AS(f.inv(0), ZeroDivisorError);
    CHECK_THROWS_AS(PrimeField(100), Error);

    const FieldElement a(3, 7);
    const FieldElement b(5, 7);
    CHECK((a * b).value() == 1);
    CHECK((a / b).value() == 2);
    CHECK_THROWS_AS(a + FieldElement(1, 11), MismatchError);
    CHECK_THROWS_AS(FieldElement(0, 7).inverse(), ZeroDivisorError);
}

TEST_CASE("barrett reduction matches division") {
    std::mt19937_64 rng(2024);
    for (std::uint64_t p : std::initializer_list<std::uint64_t>{2, 3, 101, 65537, 1000000007, 4294967311ULL, 2305843009213693951ULL, kDefaultPrime}) {
        const PrimeField f(p);
        for (int i = 0; i < 20000; ++i) {
            u128 x = (static_cast<u128>(rng()) << 64U) | rng();
            if (i % 4 == 1) x = ~static_cast<u128>(0) - rng() % 1000;
            if (i % 4 == 2) x = rng() % 1000;
            if (i % 4 == 3) x = static_cast<u128>(rng() % p) * (rng() % p);
            REQUIRE(f.reduce(x) == static_cast<std::uint64_t>(x % p));
        }
    }
}

TEST_CASE("series_mul") {
    SUBCASE("difference of squares") {
        const TruncatedSeries a(101, {1, 1, 0});
        const TruncatedSeries b(101, {1, 100, 0});
        CHECK(coeffs(series_mul(a, b)) == std::vector<std::uint64_t>{1, 0, 100});
    }
    SUBCASE("identity and oracle") {
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = random_series(rng, kDefaultPrime, 6);
            const auto b = random_series(rng, kDefaultPrime, 6);
            CHECK(series_mul(a, TruncatedSeries::one(kDefaultPrime, 6)) == a);
            CHECK(coeffs(series_mul(a, b)) == schoolbook_product(coeffs(a), coeffs(b), kDefaultPrime));
        }
    }
    SUBCASE("long series exercise the lazy reduction blocks") {
        std::mt19937_64 rng(2);
        const auto a = random_series(rng, kDefaultPrime, 70);
        const auto b = random_series(rng, kDefaultPrime, 70);
        CHECK(coeffs(series_mul(a, b)) == schoolbook_product(coeffs(a), coeffs(b), kDefaultPrime));
    }
    SUBCASE("mismatch") {
        CHECK_THROWS_AS(series_mul(TruncatedSeries(101, 3), TruncatedSeries(103, 3)), MismatchError);
        CHECK_THROWS_AS(series_mul(TruncatedSeries(101, 3), TruncatedSeries(101, 4)), MismatchError);
    }
}

TEST_CASE("series_inv") {
    const std::uint64_t p = 101;
    CHECK(coeffs(series_inv(TruncatedSeries(p, {1, 100, 0, 0}))) == std::vector<std::uint64_t>{1, 1, 1, 1});
    CHECK(series_inv(TruncatedSeries::one(p, 5)) == TruncatedSeries::one(p, 5));
    CHECK_THROWS_AS(series_inv(TruncatedSeries(p, {0, 1, 2})), ZeroDivisorError);

    std::mt19937_64 rng(3);
    for (std::size_t order = 1; order <= 64; ++order) {
        const auto a = random_unit(rng, kDefaultPrime, order);
        CHECK(series_mul(a, series_inv(a)) == TruncatedSeries::one(kDefaultPrime, order));
    }
}

TEST_CASE("series_integrate") {
    const std::uint64_t p = 101;
    const PrimeField f(p);
    CHECK(coeffs(series_integrate(TruncatedSeries(p, {1, 1, 0}))) == std::vector<std::uint64_t>{0, 1, f.inv(2)});
    CHECK(series_integrate(TruncatedSeries(p, 4)).is_zero());
    CHECK_THROWS_AS(series_integrate(TruncatedSeries(7, 7)), Error);

    std::mt19937_64 rng(4);
    for (std::size_t order = 1; order < 40; ++order) {
        const auto a = random_series(rng, kDefaultPrime, order);
        CHECK(series_derivative(series_integrate(a)) == a.truncated(order - 1));
    }
}

TEST_CASE("rank") {
    const std::uint64_t p = 101;
    FieldMatrix id(p, 4, 4);
    for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1;
    CHECK(rank(id) == 4);

    const FieldMatrix repeated(p, 3, 3, {1, 2, 3, 4, 5, 6, 1, 2, 3});
    CHECK(rank(repeated) == 2);
    CHECK(rank(FieldMatrix(p, 3, 5)) == 0);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t r = rng() % 7;
        const FieldMatrix m = (trial % 2 == 0) ? random_matrix(rng, p, 6, 6) : random_low_rank(rng, p, 6, 6, r);
        CHECK(rank(m) == rank_by_minors(as_rows(m), static_cast<std::int64_t>(p)));
    }
}

TEST_CASE("rank invariances") {
    std::mt19937_64 rng(6);
    const std::uint64_t p = kDefaultPrime;
    const PrimeField f(p);
    for (int trial = 0; trial < 50; ++trial) {
        const FieldMatrix m = random_low_rank(rng, p, 7, 5, rng() % 6);
        const std::size_t r = rank(m);
        CHECK(rank(m.transposed()) == r);
        FieldMatrix shuffled = m;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const std::size_t src = m.rows() - 1 - i;
            const std::uint64_t scale = 1 + rng() % (p - 1);
            for (std::size_t c = 0; c < m.cols(); ++c) shuffled(i, c) = f.mul(m(src, c), scale);
        }
        CHECK(rank(shuffled) == r);
    }
}

TEST_CASE("deficient_columns") {
    const std::uint64_t p = 101;
    const FieldMatrix zero_col(p, 2, 3, {1, 0, 0, 0, 1, 0});
    CHECK(deficient_columns(zero_col, 3) == std::vector<std::size_t>{2});

    // columns (c, c, d)
    const FieldMatrix dup(p, 3, 3, {1, 1, 0, 2, 2, 1, 3, 3, 5});
    CHECK(deficient_columns(dup, 3) == std::vector<std::size_t>{0, 1});

    FieldMatrix id(p, 2, 2, {1, 0, 0, 1});
    CHECK_THROWS_AS(deficient_columns(id, 2), std::logic_error);
}

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

#include "obsrank/field.hpp"

#include <array>

namespace obsrank {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e != 0) {
        if (e & 1U) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1U;
    }
    return r;
}

} // namespace

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    // These bases are sufficient for every n < 2^64.
    constexpr std::array<std::uint64_t, 7> bases{2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    for (std::uint64_t a : bases) {
        a %= n;
        if (a == 0) continue;
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
    if (p >= (1ULL << 62U)) throw Error("modulus must be below 2^62, got " + std::to_string(p));
    thread_local std::uint64_t last_checked = 0;
    if (p != last_checked) {
        if (!is_prime(p)) throw Error("modulus " + std::to_string(p) + " is not prime");
        last_checked = p;
    }
    const u128 mu = ~static_cast<u128>(0) / p;
    mu1_ = static_cast<std::uint64_t>(mu >> 64U);
    mu0_ = static_cast<std::uint64_t>(mu);
}

std::uint64_t PrimeField::from_signed(std::int64_t v) const noexcept {
    if (v >= 0) return static_cast<std::uint64_t>(v) % p_;
    // Negate in unsigned arithmetic so INT64_MIN is handled.
    std::uint64_t m = (0ULL - static_cast<std::uint64_t>(v)) % p_;
    return neg(m);
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exponent) const noexcept {
    return powmod(base, exponent, p_);
}

std::uint64_t PrimeField::inv(std::uint64_t a) const {
    a %= p_;
    if (a == 0) throw ZeroDivisorError("inverse of zero modulo " + std::to_string(p_));
    std::int64_t r0 = static_cast<std::int64_t>(p_), r1 = static_cast<std::int64_t>(a);
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        const std::int64_t r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        const std::int64_t s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
    }
    return s0 < 0 ? static_cast<std::uint64_t>(s0 + static_cast<std::int64_t>(p_)) : static_cast<std::uint64_t>(s0);
}

FieldElement::FieldElement(std::uint64_t value, std::uint64_t modulus) : value_(value % modulus), modulus_(modulus) {}

void FieldElement::check(const FieldElement& rhs) const {
    if (modulus_ != rhs.modulus_) {
        throw MismatchError("field elements modulo " + std::to_string(modulus_) + " and " +
                            std::to_string(rhs.modulus_));
    }
}

FieldElement FieldElement::operator+(const FieldElement& rhs) const {
    check(rhs);
    std::uint64_t s = value_ + rhs.value_;
    return {s >= modulus_ ? s - modulus_ : s, modulus_};
}

FieldElement FieldElement::operator-(const FieldElement& rhs) const {
    check(rhs);
    return {value_ >= rhs.value_ ? value_ - rhs.value_ : value_ + modulus_ - rhs.value_, modulus_};
}

FieldElement FieldElement::operator*(const FieldElement& rhs) const {
    check(rhs);
    return {mulmod(value_, rhs.value_, modulus_), modulus_};
}

FieldElement FieldElement::operator/(const FieldElement& rhs) const {
    check(rhs);
    return *this * rhs.inverse();
}

FieldElement FieldElement::operator-() const { return {value_ == 0 ? 0 : modulus_ - value_, modulus_}; }

FieldElement FieldElement::inverse() const {
    if (value_ == 0) throw ZeroDivisorError("inverse of zero modulo " + std::to_string(modulus_));
    return {powmod(value_, modulus_ - 2, modulus_), modulus_};
}

std::string to_string(const FieldElement& e) {
    return std::to_string(e.value()) + " (mod " + std::to_string(e.modulus()) + ")";
}

} // namespace obsrank

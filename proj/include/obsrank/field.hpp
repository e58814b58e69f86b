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

#pragma once

#include <cstdint>
#include <string>

#include "obsrank/errors.hpp"

namespace obsrank {

/// 2^62 - 57, the largest prime below 2^62.
inline constexpr std::uint64_t kDefaultPrime = 4611686018427387847ULL;

using u128 = unsigned __int128;

/// Arithmetic context for Z/pZ. Elements are plain words in [0, p).
///
/// The modulus must be a prime below 2^62 so that sums of up to sixteen
/// products fit in 128 bits before reduction (see SeriesKernel).
class PrimeField {
public:
    explicit PrimeField(std::uint64_t p = kDefaultPrime);

    std::uint64_t modulus() const noexcept { return p_; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
        std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept { return reduce(static_cast<u128>(a) * b); }

    /// Barrett reduction of any 128-bit value.
    std::uint64_t reduce(u128 x) const noexcept {
        const auto x1 = static_cast<std::uint64_t>(x >> 64U);
        const auto x0 = static_cast<std::uint64_t>(x);
        // High 128 bits of x * mu without the carry out of the lowest word,
        // so q undershoots x / p by at most 3.
        const u128 a = static_cast<u128>(x1) * mu0_;
        const u128 b = static_cast<u128>(x0) * mu1_;
        const u128 c = (static_cast<u128>(x0) * mu0_) >> 64U;
        const u128 s1 = a + b;
        const u128 s2 = s1 + c;
        const u128 carry = static_cast<u128>((s1 < a) + (s2 < s1)) << 64U;
        const u128 q = static_cast<u128>(x1) * mu1_ + (s2 >> 64U) + carry;
        auto r = static_cast<std::uint64_t>(x - q * p_);
        while (r >= p_) r -= p_;
        return r;
    }

    /// Maps a signed integer to its residue.
    std::uint64_t from_signed(std::int64_t v) const noexcept;

    std::uint64_t pow(std::uint64_t base, std::uint64_t exponent) const noexcept;

    /// Throws ZeroDivisorError for a == 0.
    std::uint64_t inv(std::uint64_t a) const;

    bool operator==(const PrimeField& other) const noexcept { return p_ == other.p_; }

private:
    std::uint64_t p_;
    // floor((2^128 - 1) / p) split into 64-bit halves.
    std::uint64_t mu1_;
    std::uint64_t mu0_;
};

/// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime(std::uint64_t n) noexcept;

/// A residue together with its modulus. Used at API boundaries; the hot
/// kernels work on raw words and a shared PrimeField.
class FieldElement {
public:
    FieldElement(std::uint64_t value, std::uint64_t modulus);

    std::uint64_t value() const noexcept { return value_; }
    std::uint64_t modulus() const noexcept { return modulus_; }
    bool is_zero() const noexcept { return value_ == 0; }

    FieldElement operator+(const FieldElement& rhs) const;
    FieldElement operator-(const FieldElement& rhs) const;
    FieldElement operator*(const FieldElement& rhs) const;
    FieldElement operator/(const FieldElement& rhs) const;
    FieldElement operator-() const;
    FieldElement inverse() const;

    bool operator==(const FieldElement& rhs) const noexcept = default;

private:
    void check(const FieldElement& rhs) const;

    std::uint64_t value_;
    std::uint64_t modulus_;
};

std::string to_string(const FieldElement& e);

} // namespace obsrank

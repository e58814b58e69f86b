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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "obsrank/field.hpp"

namespace obsrank {

namespace kernel {

/// Number of coefficients up to and including the last nonzero one.
inline std::size_t effective_length(std::span<const std::uint64_t> a) noexcept {
    std::size_t n = a.size();
    while (n > 0 && a[n - 1] == 0) --n;
    return n;
}

/// out[k] = sum_{i+j=k} a[i]*b[j] for k < out.size(). Coefficients of a and b
/// beyond their spans are treated as zero. `out` must not alias a or b.
void mul_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
               std::span<std::uint64_t> out) noexcept;

/// out[k] += (a*b)[k] for k < out.size().
void mul_add_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                   std::span<std::uint64_t> out) noexcept;

/// Reciprocal of a series with invertible constant term, truncated to out.size().
void inv_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<std::uint64_t> out);

/// Antiderivative with zero constant term; out has the same length as the
/// retained input and the top input coefficient is dropped.
void integrate(const PrimeField& f, std::span<const std::uint64_t> a, std::span<std::uint64_t> out);

} // namespace kernel

/// A power series in t over Z/pZ, known modulo t^order.
class TruncatedSeries {
public:
    TruncatedSeries(std::uint64_t modulus, std::size_t order);
    TruncatedSeries(std::uint64_t modulus, std::vector<std::uint64_t> coeffs);

    static TruncatedSeries constant(std::uint64_t modulus, std::size_t order, std::uint64_t value);
    static TruncatedSeries one(std::uint64_t modulus, std::size_t order) { return constant(modulus, order, 1); }

    std::uint64_t modulus() const noexcept { return modulus_; }
    std::size_t order() const noexcept { return coeffs_.size(); }
    std::span<const std::uint64_t> coeffs() const noexcept { return coeffs_; }
    std::span<std::uint64_t> coeffs() noexcept { return coeffs_; }
    std::uint64_t operator[](std::size_t k) const { return coeffs_.at(k); }
    bool is_zero() const noexcept;

    /// Keeps the first `order` coefficients, padding with zeros when growing.
    TruncatedSeries truncated(std::size_t order) const;

    TruncatedSeries operator+(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-(const TruncatedSeries& rhs) const;
    TruncatedSeries operator*(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-() const;
    TruncatedSeries scaled(std::uint64_t factor) const;

    bool operator==(const TruncatedSeries& rhs) const noexcept = default;

private:
    void check(const TruncatedSeries& rhs) const;

    std::uint64_t modulus_;
    std::vector<std::uint64_t> coeffs_;
};

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);

/// Throws ZeroDivisorError when the constant term vanishes.
TruncatedSeries series_inv(const TruncatedSeries& a);

/// Requires modulus > order.
TruncatedSeries series_integrate(const TruncatedSeries& a);

/// Term-wise derivative; the result has one coefficient fewer.
TruncatedSeries series_derivative(const TruncatedSeries& a);

TruncatedSeries series_pow(const TruncatedSeries& a, std::uint64_t exponent);

} // namespace obsrank

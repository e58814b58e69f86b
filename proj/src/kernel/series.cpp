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

#include "obsrank/series.hpp"

#include <algorithm>
#include <vector>

namespace obsrank {

namespace kernel {

namespace {

// Products are below 2^124 for p < 2^62, so sixteen of them fit in 128 bits.
constexpr std::size_t kLazyBlock = 16;

std::uint64_t dot_reversed(const PrimeField& f, const std::uint64_t* a, const std::uint64_t* b_rev_end,
                           std::size_t count) noexcept {
    // sum_{i<count} a[i] * b_rev_end[-i]
    std::uint64_t result = 0;
    std::size_t i = 0;
    while (i < count) {
        std::size_t stop = std::min(count, i + kLazyBlock);
        u128 acc = 0;
        for (; i < stop; ++i) acc += static_cast<u128>(a[i]) * *(b_rev_end - static_cast<std::ptrdiff_t>(i));
        result = f.add(result, f.reduce(acc));
    }
    return result;
}

} // namespace

void mul_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
               std::span<std::uint64_t> out) noexcept {
    std::fill(out.begin(), out.end(), 0);
    mul_add_trunc(f, a, b, out);
}

void mul_add_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                   std::span<std::uint64_t> out) noexcept {
    const std::size_t la = std::min(effective_length(a), out.size());
    const std::size_t lb = std::min(effective_length(b), out.size());
    if (la == 0 || lb == 0) return;
    const std::size_t top = std::min(out.size(), la + lb - 1);
    for (std::size_t k = 0; k < top; ++k) {
        // i ranges over max(0, k-lb+1) .. min(k, la-1)
        const std::size_t lo = k + 1 > lb ? k + 1 - lb : 0;
        const std::size_t hi = std::min(k, la - 1);
        out[k] = f.add(out[k], dot_reversed(f, a.data() + lo, b.data() + (k - lo), hi - lo + 1));
    }
}

void inv_trunc(const PrimeField& f, std::span<const std::uint64_t> a, std::span<std::uint64_t> out) {
    if (out.empty()) return;
    if (a.empty() || a[0] == 0) throw ZeroDivisorError("series inverse: zero constant term");
    const std::uint64_t inv0 = f.inv(a[0]);
    const std::uint64_t neg_inv0 = f.neg(inv0);
    const std::size_t la = effective_length(a);
    out[0] = inv0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        // b_k = -a_0^{-1} * sum_{i=1..min(k,la-1)} a_i b_{k-i}
        const std::size_t hi = std::min(k, la == 0 ? 0 : la - 1);
        std::uint64_t s = hi >= 1 ? dot_reversed(f, a.data() + 1, out.data() + (k - 1), hi) : 0;
        out[k] = f.mul(neg_inv0, s);
    }
}

void integrate(const PrimeField& f, std::span<const std::uint64_t> a, std::span<std::uint64_t> out) {
    if (out.empty()) return;
    if (out.size() >= f.modulus()) throw Error("series integration needs modulus > order");
    // Inverses of 1..n by the recurrence inv(k) = -(p / k) * inv(p mod k).
    const std::uint64_t p = f.modulus();
    std::vector<std::uint64_t> inverses(out.size(), 1);
    for (std::size_t k = 2; k < out.size(); ++k) inverses[k] = f.mul(p - p / k, inverses[p % k]);
    out[0] = 0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const std::uint64_t c = k - 1 < a.size() ? a[k - 1] : 0;
        out[k] = f.mul(c, inverses[k]);
    }
}

} // namespace kernel

TruncatedSeries::TruncatedSeries(std::uint64_t modulus, std::size_t order) : modulus_(modulus), coeffs_(order, 0) {}

TruncatedSeries::TruncatedSeries(std::uint64_t modulus, std::vector<std::uint64_t> coeffs)
    : modulus_(modulus), coeffs_(std::move(coeffs)) {
    for (auto& c : coeffs_) c %= modulus_;
}

TruncatedSeries TruncatedSeries::constant(std::uint64_t modulus, std::size_t order, std::uint64_t value) {
    TruncatedSeries s(modulus, order);
    if (order > 0) s.coeffs_[0] = value % modulus;
    return s;
}

bool TruncatedSeries::is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](std::uint64_t c) { return c == 0; });
}

TruncatedSeries TruncatedSeries::truncated(std::size_t order) const {
    std::vector<std::uint64_t> c(order, 0);
    std::copy_n(coeffs_.begin(), std::min(order, coeffs_.size()), c.begin());
    return {modulus_, std::move(c)};
}

void TruncatedSeries::check(const TruncatedSeries& rhs) const {
    if (modulus_ != rhs.modulus_) throw MismatchError("series moduli differ");
    if (coeffs_.size() != rhs.coeffs_.size()) {
        throw MismatchError("series orders differ: " + std::to_string(coeffs_.size()) + " vs " +
                            std::to_string(rhs.coeffs_.size()));
    }
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& rhs) const {
    check(rhs);
    const PrimeField f(modulus_);
    TruncatedSeries r(modulus_, order());
    for (std::size_t k = 0; k < order(); ++k) r.coeffs_[k] = f.add(coeffs_[k], rhs.coeffs_[k]);
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& rhs) const {
    check(rhs);
    const PrimeField f(modulus_);
    TruncatedSeries r(modulus_, order());
    for (std::size_t k = 0; k < order(); ++k) r.coeffs_[k] = f.sub(coeffs_[k], rhs.coeffs_[k]);
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& rhs) const { return series_mul(*this, rhs); }

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries r(modulus_, order());
    for (std::size_t k = 0; k < order(); ++k) r.coeffs_[k] = coeffs_[k] == 0 ? 0 : modulus_ - coeffs_[k];
    return r;
}

TruncatedSeries TruncatedSeries::scaled(std::uint64_t factor) const {
    const PrimeField f(modulus_);
    TruncatedSeries r(modulus_, order());
    factor %= modulus_;
    for (std::size_t k = 0; k < order(); ++k) r.coeffs_[k] = f.mul(coeffs_[k], factor);
    return r;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.modulus() != b.modulus()) throw MismatchError("series moduli differ");
    if (a.order() != b.order()) throw MismatchError("series orders differ");
    const PrimeField f(a.modulus());
    TruncatedSeries r(a.modulus(), a.order());
    kernel::mul_trunc(f, a.coeffs(), b.coeffs(), r.coeffs());
    return r;
}

TruncatedSeries series_inv(const TruncatedSeries& a) {
    const PrimeField f(a.modulus());
    TruncatedSeries r(a.modulus(), a.order());
    kernel::inv_trunc(f, a.coeffs(), r.coeffs());
    return r;
}

TruncatedSeries series_integrate(const TruncatedSeries& a) {
    const PrimeField f(a.modulus());
    TruncatedSeries r(a.modulus(), a.order());
    kernel::integrate(f, a.coeffs(), r.coeffs());
    return r;
}

TruncatedSeries series_derivative(const TruncatedSeries& a) {
    const PrimeField f(a.modulus());
    const std::size_t n = a.order() == 0 ? 0 : a.order() - 1;
    TruncatedSeries r(a.modulus(), n);
    for (std::size_t k = 0; k < n; ++k) r.coeffs()[k] = f.mul(a[k + 1], (k + 1) % a.modulus());
    return r;
}

TruncatedSeries series_pow(const TruncatedSeries& a, std::uint64_t exponent) {
    TruncatedSeries result = TruncatedSeries::one(a.modulus(), a.order());
    TruncatedSeries base = a;
    while (exponent != 0) {
        if (exponent & 1U) result = series_mul(result, base);
        exponent >>= 1U;
        if (exponent != 0) base = series_mul(base, base);
    }
    return result;
}

} // namespace obsrank

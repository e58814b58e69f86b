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

#include "obsrank/rings.hpp"

namespace obsrank {

namespace {

std::uint64_t residue(const PrimeField& f, const BigInt& v) {
    BigInt r = v % f.modulus();
    if (r < 0) r += f.modulus();
    return static_cast<std::uint64_t>(r);
}

BigInt integer_exponent(const Rational& q) {
    if (boost::multiprecision::denominator(q) != 1) {
        throw RationalityError("non-integer exponent " + to_string(q) + " cannot be evaluated over Z/pZ");
    }
    return boost::multiprecision::numerator(q);
}

} // namespace

std::uint64_t to_field(const PrimeField& f, const Rational& q) {
    const std::uint64_t den = residue(f, boost::multiprecision::denominator(q));
    if (den == 0) throw ZeroDivisorError("modulus divides the denominator of " + to_string(q));
    return f.mul(residue(f, boost::multiprecision::numerator(q)), f.inv(den));
}

FieldRing::Value FieldRing::pow(Value a, const Rational& q) const {
    const BigInt e = integer_exponent(q);
    if (e < 0) return field.pow(field.inv(a), static_cast<std::uint64_t>(-e));
    return field.pow(a, static_cast<std::uint64_t>(e));
}

FieldRing::Value FieldRing::analytic(NodeKind k, Value) const {
    throw RationalityError(std::string("cannot evaluate ") + kind_name(k) + " over Z/pZ");
}

SeriesRing::Value SeriesRing::pow(const Value& a, const Rational& q) const {
    const BigInt e = integer_exponent(q);
    if (e < 0) return series_pow(series_inv(a), static_cast<std::uint64_t>(-e));
    return series_pow(a, static_cast<std::uint64_t>(e));
}

SeriesRing::Value SeriesRing::analytic(NodeKind k, const Value&) const {
    throw RationalityError(std::string("cannot evaluate ") + kind_name(k) + " over truncated series");
}

} // namespace obsrank

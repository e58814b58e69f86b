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

#include "obsrank/expr.hpp"
#include "obsrank/field.hpp"
#include "obsrank/series.hpp"

namespace obsrank {

/// Residue of an exact rational; throws ZeroDivisorError when p divides the
/// denominator.
std::uint64_t to_field(const PrimeField& f, const Rational& q);

/// Evaluation over Z/pZ. Only rational nodes are accepted.
struct FieldRing {
    using Value = std::uint64_t;
    PrimeField field;

    Value from_rational(const Rational& q) const { return to_field(field, q); }
    Value add(Value a, Value b) const { return field.add(a, b); }
    Value sub(Value a, Value b) const { return field.sub(a, b); }
    Value mul(Value a, Value b) const { return field.mul(a, b); }
    Value div(Value a, Value b) const { return field.mul(a, field.inv(b)); }
    Value pow(Value a, const Rational& q) const;
    Value analytic(NodeKind k, Value a) const;
};

/// Evaluation over Z/pZ[[t]] / (t^order).
struct SeriesRing {
    using Value = TruncatedSeries;
    PrimeField field;
    std::size_t order;

    Value from_rational(const Rational& q) const {
        return TruncatedSeries::constant(field.modulus(), order, to_field(field, q));
    }
    Value add(const Value& a, const Value& b) const { return a + b; }
    Value sub(const Value& a, const Value& b) const { return a - b; }
    Value mul(const Value& a, const Value& b) const { return series_mul(a, b); }
    Value div(const Value& a, const Value& b) const { return series_mul(a, series_inv(b)); }
    Value pow(const Value& a, const Rational& q) const;
    Value analytic(NodeKind k, const Value& a) const;
};

} // namespace obsrank

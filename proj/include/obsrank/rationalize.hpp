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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "obsrank/model.hpp"

namespace obsrank {

inline constexpr int kDefaultTaylorOrder = 4;

struct ExponentChange {
    /// "dynamics[beta]:add.lhs/div.rhs/..." style location of the pow node.
    std::string location;
    Rational original;
    BigInt rounded;
    /// True when original was exactly halfway between two integers.
    bool tie = false;

    bool operator==(const ExponentChange&) const = default;
};

struct TaylorExpansion {
    std::string location;
    NodeKind kind;
    /// Value of the function argument at the expansion center.
    Rational center;
    int order;
    /// False when the constant coefficients had to be rounded to rationals.
    bool exact;
    /// Set when the center was moved off the requested point.
    std::string note;

    bool operator==(const TaylorExpansion&) const = default;
};

struct RationalizeOptions {
    int taylor_order = kDefaultTaylorOrder;
    /// Explicit center values. When non-empty, an unusable center is an
    /// error instead of falling back to a safe point.
    std::map<std::string, Rational> center;
};

struct RationalizationReport {
    std::vector<ExponentChange> exponents;
    std::vector<TaylorExpansion> expansions;
    /// Symbol values used as the Taylor center (only those that mattered).
    std::map<std::string, Rational> center;
    int taylor_order = kDefaultTaylorOrder;

    bool changed() const noexcept { return !exponents.empty() || !expansions.empty(); }
    /// One human-readable line per approximation.
    std::vector<std::string> caveats() const;
};

/// Rounds every non-integer pow exponent to the nearest integer, ties to even.
std::pair<OdeModel, std::vector<ExponentChange>> round_exponents(const OdeModel& m);

/// Replaces every analytic node by its Taylor polynomial of the given order
/// in its (already rational) argument. Center values default to the model's
/// initial hints, then 0.
OdeModel taylor_substitute(const OdeModel& m, const std::map<std::string, Rational>& center, int order,
                           std::vector<TaylorExpansion>* log = nullptr);

/// Taylor coefficients c_0..c_order of f(a + h) in h. `exact` is cleared when
/// a coefficient is a rounded transcendental value. Throws RationalityError
/// for a singular point.
std::vector<Rational> taylor_coefficients(NodeKind kind, const Rational& a, int order, bool* exact = nullptr);

/// round_exponents then taylor_substitute. Returns the input unchanged (same
/// DAG) when it is already rational. Throws RationalityError on failure.
std::pair<OdeModel, RationalizationReport> rationalize_model(const OdeModel& m, const RationalizeOptions& options = {});

} // namespace obsrank

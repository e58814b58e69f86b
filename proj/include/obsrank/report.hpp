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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obsrank/field.hpp"
#include "obsrank/model.hpp"
#include "obsrank/rationalize.hpp"

namespace obsrank {

enum class Algorithm { Fispo, ProbObs };

enum class Verdict { Identifiable, Unidentifiable, Observable, Unobservable, Reconstructible, NotReconstructible };

enum class Confidence { CertifiedAtPoint, Probabilistic };

/// FISPO: every component recovered. Deficient: at least one is not.
enum class Outcome { Fispo, Deficient, Inconclusive };

const char* algorithm_name(Algorithm a) noexcept;
const char* verdict_name(Verdict v) noexcept;
const char* confidence_name(Confidence c) noexcept;
const char* outcome_name(Outcome o) noexcept;
Algorithm parse_algorithm(const std::string& s);

/// Verdict for a component, given whether its column is deficient.
Verdict verdict_for(ComponentKind kind, bool deficient) noexcept;
bool is_deficient(Verdict v) noexcept;

inline constexpr std::uint64_t kDefaultSampleBound = std::uint64_t{1} << 20;
inline constexpr std::size_t kDefaultNodeBudget = 4'000'000;

struct AnalysisOptions {
    Algorithm algorithm = Algorithm::ProbObs;
    /// Overrides the per-input derivative counts declared in the model.
    DerivativeCaps unknown_derivs;
    /// Highest known-input derivative treated as nonzero; default unlimited.
    std::optional<int> known_input_derivs;
    std::map<std::string, Rational> fixed;
    std::uint64_t seed = 1;
    std::uint64_t prime = kDefaultPrime;
    /// fispo: highest Lie derivative order; default dim(x̄).
    std::optional<int> max_lie_order;
    /// fispo: first order at which rank is tested; default ceil((dim - n_y)/n_y).
    std::optional<int> min_lie_order;
    std::size_t node_budget = kDefaultNodeBudget;
    int taylor_order = kDefaultTaylorOrder;
    std::map<std::string, Rational> taylor_center;
    int retries = 3;
    std::uint64_t sample_bound = kDefaultSampleBound;
    /// probobs: series truncation order; default dim(x̄) + 1.
    std::optional<std::size_t> truncation_order;
    /// Wall-clock budget in seconds; 0 disables it.
    double time_budget = 0;
    /// Re-check the verdict at a second, independent specialization.
    bool confirm = true;

    /// Throws Error on invalid values.
    void validate() const;
};

struct VariableVerdict {
    std::string name;
    ComponentKind tag;
    int level = 0;
    Verdict verdict;
    Confidence confidence;

    bool operator==(const VariableVerdict&) const = default;
};

struct AnalysisReport {
    std::string model_id;
    Algorithm algorithm = Algorithm::ProbObs;
    Outcome outcome = Outcome::Inconclusive;
    /// One entry per augmented component, in component order.
    std::vector<VariableVerdict> verdicts;
    std::size_t rank = 0;
    std::size_t dimension = 0;
    std::size_t transcendence_degree = 0;
    /// fispo: Lie derivative orders computed (highest order + 1).
    std::size_t lie_orders = 0;
    /// probobs: series truncation order.
    std::size_t truncation_order = 0;
    std::uint64_t seed = 0;
    std::uint64_t prime = 0;
    /// Resamplings caused by unlucky specializations.
    std::size_t retries = 0;
    std::vector<std::string> caveats;
    std::vector<std::string> warnings;
    /// Why the run was inconclusive, with a suggested remedy.
    std::string message;
    double duration_seconds = 0;

    bool operator==(const AnalysisReport&) const = default;

    std::vector<std::string> deficient() const;
    std::string to_json(int indent = 2) const;
    static AnalysisReport from_json(const std::string& text);
    std::string to_text() const;
};

} // namespace obsrank

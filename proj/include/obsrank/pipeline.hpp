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

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "obsrank/model.hpp"
#include "obsrank/report.hpp"

namespace obsrank {

/// The augmented, rationalized model both engines analyze.
struct PreparedModel {
    AugmentedModel model;
    /// Approximations introduced by rationalization.
    std::vector<std::string> caveats;
    std::vector<std::string> warnings;
};

/// fix_variables, rationalize_model, then both augmentations. Works on a
/// private copy of the model's DAG.
PreparedModel prepare_model(const OdeModel& m, const AnalysisOptions& options);

/// Throws TimeoutError once the budget (seconds, 0 = none) has elapsed.
class Deadline {
public:
    explicit Deadline(double seconds);
    void check() const;
    std::function<void()> hook() const {
        return [*this] { check(); };
    }

private:
    bool active_;
    std::chrono::steady_clock::time_point end_;
    double seconds_;
};

/// Columns that take part in the rank test (components without a known value).
std::vector<std::size_t> free_columns(const AugmentedModel& m);

/// Fills a report's verdicts from the deficient column set. `confidence`
/// applies to deficient components; recovered ones are certified at the point.
void fill_verdicts(AnalysisReport& report, const AugmentedModel& m, const std::vector<std::size_t>& deficient);

/// Deterministic 64-bit mixer used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace obsrank

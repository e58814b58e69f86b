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
#include <optional>
#include <string>
#include <vector>

#include "obsrank/model.hpp"
#include "obsrank/report.hpp"

namespace obsrank {

/// Runs the engine selected by options.algorithm.
AnalysisReport analyze(const OdeModel& m, const AnalysisOptions& options);

/// Expected classification of one corpus entry.
struct Golden {
    std::string model;
    /// "published" or "cross-engine".
    std::string source;
    Outcome outcome = Outcome::Fispo;
    /// Exact deficient set, when known.
    std::optional<std::vector<std::string>> deficient;
    /// Required number of components per deficient verdict.
    std::map<Verdict, std::size_t> counts;
    /// fispo may run out of time or nodes on this entry.
    bool fispo_may_fail = false;

    static Golden from_json(const std::string& text);
};

/// Golden of `name/variant` from the models directory, if one exists.
std::optional<Golden> load_golden(const std::string& entry);

enum class GoldenStatus { Match, Mismatch, Missing, Excused };

const char* golden_status_name(GoldenStatus s) noexcept;

/// Exact comparison. `detail` receives a description of any mismatch.
GoldenStatus compare_golden(const Golden& g, const AnalysisReport& r, std::string* detail = nullptr);

/// Entries `name/variant` of a suite declared in models/suites.json.
std::vector<std::string> load_suite(const std::string& suite);

/// Splits `name/variant`; a bare name means the default variant.
OdeModel load_entry(const std::string& entry);

enum class RunStatus { Ok, Timeout, Budget, Inconclusive, Error };

const char* run_status_name(RunStatus s) noexcept;

RunStatus run_status(const AnalysisReport& r);

struct BenchRow {
    std::string entry;
    Algorithm algorithm = Algorithm::ProbObs;
    RunStatus status = RunStatus::Ok;
    GoldenStatus golden = GoldenStatus::Missing;
    std::string detail;
    AnalysisReport report;
};

struct BenchOptions {
    std::vector<Algorithm> algorithms{Algorithm::Fispo, Algorithm::ProbObs};
    /// Per-run wall-clock budget in seconds; 0 disables it.
    double budget = 600;
    unsigned threads = 1;
    /// Settings shared by every run; algorithm and time budget are overridden.
    AnalysisOptions base;
};

struct BenchTable {
    std::string suite;
    std::vector<BenchRow> rows;

    /// No row mismatches its golden.
    bool passed() const;
    std::string to_json(int indent = 2) const;
    std::string to_text() const;
};

/// One row per entry x algorithm, in entry-major order regardless of threads.
BenchTable bench(const std::vector<std::string>& entries, const BenchOptions& options);

} // namespace obsrank

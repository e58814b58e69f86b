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

#include <json.hpp>

#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include "obsrank/analysis.hpp"
#include "obsrank/errors.hpp"

namespace obsrank {

const char* run_status_name(RunStatus s) noexcept {
    switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::Budget: return "node-budget";
    case RunStatus::Inconclusive: return "inconclusive";
    case RunStatus::Error: return "error";
    }
    return "?";
}

RunStatus run_status(const AnalysisReport& r) {
    if (r.outcome != Outcome::Inconclusive) return RunStatus::Ok;
    if (r.message.find("time budget") != std::string::npos) return RunStatus::Timeout;
    if (r.message.find("node budget") != std::string::npos) return RunStatus::Budget;
    return RunStatus::Inconclusive;
}

namespace {

BenchRow run_cell(const std::string& entry, Algorithm algorithm, const BenchOptions& options) {
    BenchRow row;
    row.entry = entry;
    row.algorithm = algorithm;
    try {
        AnalysisOptions o = options.base;
        o.algorithm = algorithm;
        o.time_budget = options.budget;
        row.report = analyze(load_entry(entry), o);
        row.status = run_status(row.report);
        if (const auto g = load_golden(entry)) row.golden = compare_golden(*g, row.report, &row.detail);
    } catch (const std::exception& e) {
        row.status = RunStatus::Error;
        row.report.model_id = entry;
        row.report.algorithm = algorithm;
        row.report.message = e.what();
        row.detail = e.what();
        row.golden = load_golden(entry) ? GoldenStatus::Mismatch : GoldenStatus::Missing;
    }
    return row;
}

} // namespace

BenchTable bench(const std::vector<std::string>& entries, const BenchOptions& options) {
    BenchTable table;
    const std::size_t cells = entries.size() * options.algorithms.size();
    table.rows.resize(cells);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            table.rows[i] = run_cell(entries[i / options.algorithms.size()], options.algorithms[i % options.algorithms.size()], options);
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(std::max<std::size_t>(cells, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return table;
}

bool BenchTable::passed() const {
    for (const auto& r : rows)
        if (r.golden == GoldenStatus::Mismatch) return false;
    return true;
}

std::string BenchTable::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["model"] = r.entry;
        row["algorithm"] = algorithm_name(r.algorithm);
        row["status"] = run_status_name(r.status);
        row["golden"] = golden_status_name(r.golden);
        row["detail"] = r.detail;
        row["duration_seconds"] = r.report.duration_seconds;
        row["report"] = nlohmann::ordered_json::parse(r.report.to_json());
        j["rows"].push_back(std::move(row));
    }
    return j.dump(indent);
}

std::string BenchTable::to_text() const {
    std::ostringstream s;
    s << std::left << std::setw(34) << "model" << std::setw(9) << "engine" << std::setw(14) << "status" << std::setw(13)
      << "outcome" << std::setw(10) << "golden" << std::right << std::setw(12) << "seconds" << "\n";
    for (const auto& r : rows) {
        s << std::left << std::setw(34) << r.entry << std::setw(9) << algorithm_name(r.algorithm) << std::setw(14)
          << run_status_name(r.status) << std::setw(13) << outcome_name(r.report.outcome) << std::setw(10)
          << golden_status_name(r.golden) << std::right << std::setw(12) << std::fixed << std::setprecision(4)
          << r.report.duration_seconds << "\n";
        if (r.golden == GoldenStatus::Mismatch) s << "    " << r.detail << "\n";
    }
    s << (passed() ? "all rows match their goldens" : "golden mismatches found") << "\n";
    return s.str();
}

} // namespace obsrank

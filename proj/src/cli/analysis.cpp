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

#include "obsrank/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "obsrank/errors.hpp"
#include "obsrank/fispo.hpp"
#include "obsrank/probobs.hpp"

namespace obsrank {

namespace {

Verdict parse_verdict(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(Verdict::NotReconstructible); ++i)
        if (s == verdict_name(static_cast<Verdict>(i))) return static_cast<Verdict>(i);
    throw Error("unknown verdict '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
    for (Outcome o : {Outcome::Fispo, Outcome::Deficient, Outcome::Inconclusive})
        if (s == outcome_name(o)) return o;
    throw Error("unknown outcome '" + s + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return "{" + s + "}";
}

} // namespace

AnalysisReport analyze(const OdeModel& m, const AnalysisOptions& options) {
    return options.algorithm == Algorithm::Fispo ? fispo_test(m, options) : prob_obs_test(m, options);
}

Golden Golden::from_json(const std::string& text) {
    Golden g;
    try {
        const auto j = nlohmann::json::parse(text);
        g.model = j.at("model").get<std::string>();
        g.source = j.at("source").get<std::string>();
        g.outcome = parse_outcome(j.at("outcome").get<std::string>());
        if (j.contains("deficient")) g.deficient = j.at("deficient").get<std::vector<std::string>>();
        if (j.contains("counts"))
            for (const auto& [k, v] : j.at("counts").items()) g.counts[parse_verdict(k)] = v.get<std::size_t>();
        g.fispo_may_fail = j.value("fispo_may_fail", false);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed golden: ") + e.what());
    }
    return g;
}

std::optional<Golden> load_golden(const std::string& entry) {
    std::string name = entry, variant = "default";
    if (const auto slash = entry.find('/'); slash != std::string::npos) {
        name = entry.substr(0, slash);
        variant = entry.substr(slash + 1);
    }
    const auto path = models_directory() / name / (variant + ".golden.json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    return Golden::from_json(read_file(path));
}

const char* golden_status_name(GoldenStatus s) noexcept {
    switch (s) {
    case GoldenStatus::Match: return "match";
    case GoldenStatus::Mismatch: return "mismatch";
    case GoldenStatus::Missing: return "missing";
    case GoldenStatus::Excused: return "excused";
    }
    return "?";
}

GoldenStatus compare_golden(const Golden& g, const AnalysisReport& r, std::string* detail) {
    auto fail = [&](const std::string& why) {
        if (detail != nullptr) *detail = why;
        return GoldenStatus::Mismatch;
    };
    if (r.outcome == Outcome::Inconclusive) {
        if (r.algorithm == Algorithm::Fispo && g.fispo_may_fail) {
            if (detail != nullptr) *detail = r.message;
            return GoldenStatus::Excused;
        }
        return fail("inconclusive: " + r.message);
    }
    if (r.outcome != g.outcome)
        return fail(std::string("outcome ") + outcome_name(r.outcome) + ", expected " + outcome_name(g.outcome));
    if (g.deficient) {
        const auto got = r.deficient();
        if (std::set<std::string>(got.begin(), got.end()) != std::set<std::string>(g.deficient->begin(), g.deficient->end()))
            return fail("deficient " + join(got) + ", expected " + join(*g.deficient));
    }
    for (const auto& [verdict, count] : g.counts) {
        const auto n = static_cast<std::size_t>(std::count_if(r.verdicts.begin(), r.verdicts.end(),
                                                              [&](const VariableVerdict& v) { return v.verdict == verdict; }));
        if (n != count)
            return fail(std::to_string(n) + " " + verdict_name(verdict) + ", expected " + std::to_string(count));
    }
    if (detail != nullptr) detail->clear();
    return GoldenStatus::Match;
}

std::vector<std::string> load_suite(const std::string& suite) {
    const auto path = models_directory() / "suites.json";
    try {
        const auto j = nlohmann::json::parse(read_file(path));
        if (!j.contains(suite)) {
            std::string known;
            for (const auto& [k, v] : j.items()) known += (known.empty() ? "" : ", ") + k;
            throw Error("unknown suite '" + suite + "' (known: " + known + ")");
        }
        return j.at(suite).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed " + path.string() + ": " + e.what());
    }
}

OdeModel load_entry(const std::string& entry) {
    const auto slash = entry.find('/');
    if (slash == std::string::npos) return builtin_model(entry);
    return builtin_model(entry.substr(0, slash), entry.substr(slash + 1));
}

} // namespace obsrank

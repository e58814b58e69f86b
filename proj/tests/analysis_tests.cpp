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

#include <doctest.h>

#include <set>
#include <sstream>

#include "obsrank/analysis.hpp"
#include "obsrank/errors.hpp"

using namespace obsrank;

namespace {

std::set<std::string> text_verdicts(const std::string& text) {
    std::set<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("  ", 0) != 0) continue;
        std::istringstream w(line);
        std::string name, tag, verdict;
        w >> name >> tag >> verdict;
        out.insert(name + " " + tag + " " + verdict);
    }
    return out;
}

std::set<std::string> json_verdicts(const AnalysisReport& r) {
    std::set<std::string> out;
    for (const auto& v : AnalysisReport::from_json(r.to_json()).verdicts)
        out.insert(v.name + " " + component_kind_name(v.tag) + " " + verdict_name(v.verdict));
    return out;
}

AnalysisReport without_duration(AnalysisReport r) {
    r.duration_seconds = 0;
    return r;
}

} // namespace

TEST_CASE("analyze dispatches on the algorithm") {
    AnalysisOptions o;
    o.algorithm = Algorithm::Fispo;
    CHECK(analyze(builtin_model("hiv3"), o).algorithm == Algorithm::Fispo);
    o.algorithm = Algorithm::ProbObs;
    const AnalysisReport r = analyze(builtin_model("hiv3"), o);
    CHECK(r.algorithm == Algorithm::ProbObs);
    CHECK(r.outcome == Outcome::Fispo);
}

TEST_CASE("report json round trip and text parity") {
    AnalysisOptions timeout;
    timeout.time_budget = 1e-9;
    std::vector<AnalysisReport> reports;
    for (Algorithm a : {Algorithm::Fispo, Algorithm::ProbObs}) {
        AnalysisOptions o;
        o.algorithm = a;
        reports.push_back(analyze(builtin_model("c2m", "unknown-input-b-known-3"), o));
        reports.push_back(analyze(builtin_model("big", "known-input"), o));
        timeout.algorithm = a;
        reports.push_back(analyze(builtin_model("nfkb", "29-param"), timeout));
    }
    for (const auto& r : reports) {
        CAPTURE(r.model_id);
        CHECK(AnalysisReport::from_json(r.to_json()) == r);
        CHECK(AnalysisReport::from_json(r.to_json(-1)) == r);
        CHECK(text_verdicts(r.to_text()) == json_verdicts(r));
        CHECK(text_verdicts(r.to_text()).size() == r.verdicts.size());
    }
    CHECK_FALSE(reports[1].caveats.empty());
    CHECK_THROWS_AS(AnalysisReport::from_json("{\"model\": 1}"), Error);
}

TEST_CASE("golden comparison") {
    const Golden g = Golden::from_json(
        R"({"model": "m", "source": "published", "outcome": "deficient", "deficient": ["x2", "k"], "counts": {"unobservable": 1}})");
    AnalysisReport r;
    r.algorithm = Algorithm::ProbObs;
    r.outcome = Outcome::Deficient;
    r.verdicts = {{"x1", ComponentKind::State, 0, Verdict::Observable, Confidence::CertifiedAtPoint},
                  {"x2", ComponentKind::State, 0, Verdict::Unobservable, Confidence::Probabilistic},
                  {"k", ComponentKind::Parameter, 0, Verdict::Unidentifiable, Confidence::Probabilistic}};
    CHECK(compare_golden(g, r) == GoldenStatus::Match);

    AnalysisReport extra = r;
    extra.verdicts[0].verdict = Verdict::Unobservable;
    std::string why;
    CHECK(compare_golden(g, extra, &why) == GoldenStatus::Mismatch);
    CHECK(why.find("x1") != std::string::npos);

    AnalysisReport fail = r;
    fail.outcome = Outcome::Inconclusive;
    fail.algorithm = Algorithm::Fispo;
    CHECK(compare_golden(g, fail) == GoldenStatus::Mismatch);
    Golden lenient = g;
    lenient.fispo_may_fail = true;
    CHECK(compare_golden(lenient, fail) == GoldenStatus::Excused);
    fail.algorithm = Algorithm::ProbObs;
    CHECK(compare_golden(lenient, fail) == GoldenStatus::Mismatch);

    const Golden counted = Golden::from_json(
        R"({"model": "m", "source": "published", "outcome": "deficient", "counts": {"unobservable": 2}})");
    CHECK(compare_golden(counted, r) == GoldenStatus::Mismatch);
}

TEST_CASE("every corpus entry has a golden") {
    const auto published = load_suite("published");
    for (const auto& [name, variant] : corpus_entries()) {
        const auto g = load_golden(name + "/" + variant);
        REQUIRE(g.has_value());
        CHECK(g->model == name + "/" + variant);
        CHECK((g->source == "published" || g->source == "cross-engine"));
        CHECK((g->deficient.has_value() || !g->counts.empty() || g->outcome == Outcome::Fispo));
        const bool listed = std::find(published.begin(), published.end(), g->model) != published.end();
        CHECK(listed == (g->source == "published"));
    }
    CHECK(load_suite("published").size() == 12);
    CHECK_THROWS_AS(load_suite("nope"), Error);
    CHECK_FALSE(load_golden("nope/none").has_value());
}

TEST_CASE("bench on the c2m suite") {
    BenchOptions o;
    const BenchTable t = bench(load_suite("c2m"), o);
    REQUIRE(t.rows.size() == 10);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].algorithm == (i % 2 == 0 ? Algorithm::Fispo : Algorithm::ProbObs));
        CHECK(t.rows[i].status == RunStatus::Ok);
        CHECK(t.rows[i].golden == GoldenStatus::Match);
    }
    CHECK(t.passed());
    CHECK(t.to_text().find("all rows match") != std::string::npos);
}

TEST_CASE("bench edge cases") {
    CHECK(bench({}, BenchOptions{}).rows.empty());
    CHECK(bench(load_suite("empty"), BenchOptions{}).passed());

    BenchOptions small;
    small.algorithms = {Algorithm::Fispo};
    small.budget = 1e-6;
    const BenchTable t = bench({"big/unknown-input-3"}, small);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].status == RunStatus::Timeout);
    CHECK(t.rows[0].golden == GoldenStatus::Excused);
    CHECK(t.passed());

    BenchOptions nodes;
    nodes.algorithms = {Algorithm::Fispo};
    nodes.base.node_budget = 100;
    CHECK(bench({"hiv5"}, nodes).rows[0].status == RunStatus::Budget);

    const BenchTable missing = bench({"nope/none"}, BenchOptions{});
    REQUIRE(missing.rows.size() == 2);
    CHECK(missing.rows[0].status == RunStatus::Error);
    CHECK(missing.rows[0].golden == GoldenStatus::Missing);
}

TEST_CASE("bench output does not depend on thread count") {
    const auto entries = load_suite("quick");
    BenchOptions one;
    BenchOptions three;
    three.threads = 3;
    const BenchTable a = bench(entries, one);
    const BenchTable b = bench(entries, three);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CAPTURE(a.rows[i].entry);
        CHECK(a.rows[i].entry == b.rows[i].entry);
        CHECK(without_duration(a.rows[i].report) == without_duration(b.rows[i].report));
    }
}

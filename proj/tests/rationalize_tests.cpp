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

#include <cmath>
#include <set>

#include "obsrank/errors.hpp"
#include "obsrank/rationalize.hpp"
#include "oracles.hpp"

using namespace obsrank;

namespace {

using testing::Float;
using testing::FloatRing;
using testing::to_float;

OdeModel one_state(const std::string& rhs, const std::string& extra = "") {
    return parse_model("states: x\n" + extra + "dynamics:\n  d(x)/dt = " + rhs + "\noutputs:\n  x\n");
}

Rational eval_exact(const OdeModel& m, NodeId e, const Rational& x) {
    const NodeId roots[] = {e};
    return evaluate(*m.dag, std::span<const NodeId>(roots), RationalRing{}, [&](SymbolId) { return x; })[0];
}

Float eval_float(const OdeModel& m, NodeId e, const Float& x) {
    const NodeId roots[] = {e};
    return evaluate(*m.dag, std::span<const NodeId>(roots), FloatRing{}, [&](SymbolId) { return x; })[0];
}

std::vector<std::string> rendered(const OdeModel& m) {
    std::vector<std::string> out;
    for (NodeId r : m.dynamics) out.push_back(m.dag->to_string(r));
    for (NodeId r : m.outputs) out.push_back(m.dag->to_string(r));
    return out;
}

} // namespace

TEST_CASE("taylor coefficients") {
    bool exact = false;
    auto log1 = taylor_coefficients(NodeKind::Log, 1, 3, &exact);
    CHECK(exact);
    CHECK(log1 == std::vector<Rational>{0, 1, Rational(-1, 2), Rational(1, 3)});
    CHECK(taylor_coefficients(NodeKind::Sin, 0, 3) == std::vector<Rational>{0, 1, 0, Rational(-1, 6)});
    CHECK(taylor_coefficients(NodeKind::Cos, 0, 4) == std::vector<Rational>{1, 0, Rational(-1, 2), 0, Rational(1, 24)});
    CHECK(taylor_coefficients(NodeKind::Exp, 0, 3) == std::vector<Rational>{1, 1, Rational(1, 2), Rational(1, 6)});
    CHECK(taylor_coefficients(NodeKind::Tan, 0, 5) == std::vector<Rational>{0, 1, 0, Rational(1, 3), 0, Rational(2, 15)});

    auto log2 = taylor_coefficients(NodeKind::Log, 2, 2, &exact);
    CHECK_FALSE(exact);
    CHECK(log2[1] == Rational(1, 2));
    CHECK(log2[2] == Rational(-1, 8));
    CHECK(std::abs(static_cast<double>(log2[0]) - std::log(2.0)) < 1e-15);
    CHECK_THROWS_AS(taylor_coefficients(NodeKind::Log, 0, 2), RationalityError);
    CHECK_THROWS_AS(taylor_coefficients(NodeKind::Log, -3, 2), RationalityError);
}

TEST_CASE("taylor_substitute examples") {
    OdeModel m = one_state("log(1 + x)");
    OdeModel t = taylor_substitute(m, {{"x", 0}}, 3);
    CHECK(is_rational(*t.dag, t.dynamics[0]));
    for (Rational x : {Rational(0), Rational(1, 3), Rational(-2, 7), Rational(5)}) {
        CHECK(eval_exact(t, t.dynamics[0], x) == x - x * x / 2 + x * x * x / 3);
    }
    OdeModel s = taylor_substitute(one_state("sin(x)"), {{"x", 0}}, 3);
    for (Rational x : {Rational(0), Rational(1, 3), Rational(-9, 4)}) {
        CHECK(eval_exact(s, s.dynamics[0], x) == x - x * x * x / 6);
    }
    CHECK(m.dag->to_string(m.dynamics[0]) == "log(1 + x)");
}

TEST_CASE("taylor remainder decays with the expected order") {
    struct Case {
        const char* rhs;
        Rational center;
        int order;
    };
    const Case cases[] = {
        {"log(1 + x)", 0, 3},       {"log(1 + x)", 0, 4},     {"log(2*x + 3)", 1, 4}, {"exp(x)", 0, 4},
        {"exp(3*x - 1)", Rational(1, 2), 3}, {"sin(x)", 0, 4}, {"sin(x^2 + x)", Rational(1, 3), 4},
        {"cos(x)", 0, 2},           {"tan(x)", 0, 4},         {"x*exp(log(1 + x))", 0, 4},
    };
    for (const Case& c : cases) {
        CAPTURE(c.rhs);
        CAPTURE(c.order);
        OdeModel m = one_state(c.rhs);
        OdeModel t = taylor_substitute(m, {{"x", c.center}}, c.order);
        REQUIRE(is_rational(*t.dag, t.dynamics[0]));
        std::vector<Float> ratios;
        std::vector<Float> errors;
        for (int e = 4; e <= 10; ++e) {
            const Rational h(1, BigInt(1) << e);
            const Float approx = to_float(eval_exact(t, t.dynamics[0], c.center + h));
            const Float truth = eval_float(m, m.dynamics[0], to_float(c.center + h));
            const Float err = boost::multiprecision::abs(approx - truth);
            errors.push_back(err);
            ratios.push_back(err / boost::multiprecision::pow(to_float(h), c.order + 1));
        }
        for (std::size_t i = 0; i < ratios.size(); ++i) CHECK(ratios[i] <= 2 * ratios[0] + Float(1e-20));
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            if (errors[i + 1] == 0) continue;
            const double observed = static_cast<double>(boost::multiprecision::log2(errors[i] / errors[i + 1]));
            CHECK(observed > c.order + 1 - 0.2);
        }
    }
}

TEST_CASE("taylor center falls back for log") {
    OdeModel m = one_state("v*(1 + e*log(x/k))", "parameters: v, e, k\n");
    std::vector<TaylorExpansion> log;
    OdeModel t = taylor_substitute(m, {}, 2, &log);
    REQUIRE(log.size() == 1);
    CHECK(log[0].center == 1);
    CHECK_FALSE(log[0].note.empty());
    CHECK(is_rational(*t.dag, t.dynamics[0]));

    OdeModel hinted = one_state("log(x)", "initial:\n  x = 2\n");
    log.clear();
    taylor_substitute(hinted, {}, 2, &log);
    REQUIRE(log.size() == 1);
    CHECK(log[0].center == 2);
    CHECK(log[0].note.empty());
    CHECK_FALSE(log[0].exact);

    CHECK_THROWS_AS(taylor_substitute(one_state("log(x)"), {{"x", -1}}, 2), RationalityError);
    CHECK_THROWS_AS(taylor_substitute(one_state("exp(1/x)"), {{"x", 0}}, 2), RationalityError);
}

TEST_CASE("round_exponents") {
    OdeModel big = builtin_model("big", "known-input");
    auto [rounded, changes] = round_exponents(big);
    REQUIRE(changes.size() == 2);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : changes) {
        CHECK(c.location.find("dynamics[beta]") == 0);
        seen.emplace(to_string(c.original), c.rounded.str());
        CHECK(c.tie == (c.original == Rational(17, 2)));
    }
    CHECK(seen == std::set<std::pair<std::string, std::string>>{{"17/10", "2"}, {"17/2", "8"}});
    for (NodeId r : rounded.dynamics) CHECK(is_rational(*rounded.dag, r));

    OdeModel cube = one_state("x^3 + 2*x");
    auto [same, none] = round_exponents(cube);
    CHECK(none.empty());
    CHECK(rendered(same) == rendered(cube));

    auto [neg, log] = round_exponents(one_state("x^(-1.5) + x^2.5 + x^0.2"));
    REQUIRE(log.size() == 3);
    std::set<std::string> r;
    for (const auto& c : log) r.insert(c.rounded.str());
    CHECK(r == std::set<std::string>{"-2", "2", "0"});
}

TEST_CASE("rationalize_model") {
    OdeModel c2m = builtin_model("c2m", "known-input");
    auto [same, empty] = rationalize_model(c2m);
    CHECK(same.dag == c2m.dag);
    CHECK_FALSE(empty.changed());
    CHECK(empty.caveats().empty());

    auto [big, report] = rationalize_model(builtin_model("big", "unknown-input-3"));
    CHECK(report.exponents.size() == 2);
    CHECK(report.expansions.empty());
    CHECK(report.caveats().size() == 2);
    bool tie_logged = false;
    for (const auto& line : report.caveats()) tie_logged = tie_logged || line.find("tie") != std::string::npos;
    CHECK(tie_logged);

    OdeModel linlog = parse_model(R"(states: s, p
parameters: v, e, k
dynamics:
  d(s)/dt = -v*(1 + e*log(s/k))
  d(p)/dt = v*(1 + e*log(s/k)) - p
outputs:
  p
)");
    auto [rl, rep] = rationalize_model(linlog);
    for (NodeId r : rl.dynamics) CHECK(is_rational(*rl.dag, r));
    CHECK(rep.expansions.size() == 1);
    CHECK(rep.center.count("s"));
}

TEST_CASE("rationalize_model is idempotent on the corpus") {
    auto check = [](const OdeModel& m) {
        auto [once, r1] = rationalize_model(m);
        for (NodeId r : once.dynamics) CHECK(is_rational(*once.dag, r));
        for (NodeId r : once.outputs) CHECK(is_rational(*once.dag, r));
        auto [twice, r2] = rationalize_model(once);
        CHECK_FALSE(r2.changed());
        CHECK(rendered(twice) == rendered(once));
    };
    for (const auto& [name, variant] : corpus_entries()) {
        CAPTURE(name);
        CAPTURE(variant);
        check(builtin_model(name, variant));
    }
    check(one_state("sin(x)*cos(x) + tan(x^0.5)"));
}

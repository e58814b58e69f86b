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

#include <random>

#include "obsrank/expr.hpp"
#include "obsrank/rings.hpp"

using namespace obsrank;

namespace {

struct Fixture {
    ExpressionDag dag;
    SymbolTable table;

    explicit Fixture(std::initializer_list<const char*> names) {
        for (const char* n : names) table.emplace(n, dag.symbol(n));
    }
    NodeId parse(std::string_view text) { return parse_expression(dag, text, table); }

    Rational eval_q(NodeId e, const std::map<std::string, Rational>& env) {
        const NodeId roots[] = {e};
        return evaluate(dag, roots, RationalRing{}, [&](SymbolId s) { return env.at(dag.symbol_name(s)); })[0];
    }
    std::uint64_t eval_p(NodeId e, const std::map<std::string, std::uint64_t>& env, std::uint64_t p) {
        const NodeId roots[] = {e};
        return evaluate(dag, roots, FieldRing{PrimeField(p)}, [&](SymbolId s) { return env.at(dag.symbol_name(s)); })[0];
    }
};

/// Random rational expression over x, y, z with small integer constants.
NodeId random_expression(ExpressionDag& dag, std::mt19937_64& rng, int depth, bool allow_div) {
    if (depth == 0 || rng() % 4 == 0) {
        if (rng() % 3 == 0) return dag.constant(Rational(static_cast<int>(rng() % 7) - 3));
        static const char* names[] = {"x", "y", "z"};
        return dag.symbol(names[rng() % 3]);
    }
    const NodeId a = random_expression(dag, rng, depth - 1, allow_div);
    const NodeId b = random_expression(dag, rng, depth - 1, allow_div);
    switch (rng() % (allow_div ? 5 : 4)) {
    case 0: return dag.add(a, b);
    case 1: return dag.sub(a, b);
    case 2: return dag.mul(a, b);
    case 3: return dag.pow(a, Rational(static_cast<int>(rng() % 3)));
    default: return dag.is_zero(b) ? a : dag.div(a, b);
    }
}

} // namespace

TEST_CASE("parse_expression") {
    Fixture fx{"k12", "x1", "k21", "x2", "k1e", "b", "u", "G"};
    auto& dag = fx.dag;

    const NodeId e = fx.parse("k12*x1 - k21*x2");
    CHECK(dag.node(e).kind == NodeKind::Sub);
    CHECK(dag.node(dag.node(e).lhs).kind == NodeKind::Mul);
    CHECK(dag.count_nodes(e) == 7);

    const NodeId c2m = fx.parse("-(k1e+k12)*x1+k21*x2+b*u");
    CHECK(fx.eval_q(c2m, {{"k1e", 1}, {"k12", 2}, {"x1", 3}, {"k21", 4}, {"x2", 5}, {"b", 6}, {"u", 7}}) ==
          Rational(-9 + 20 + 42));

    const NodeId hill = fx.parse("1/(1+(8.4/G)^1.7)");
    const auto offenders = non_rational_nodes(dag, hill);
    REQUIRE(offenders.size() == 1);
    CHECK(*offenders[0].exponent == Rational(17, 10));

    SUBCASE("precedence: power binds tighter than unary minus") {
        Fixture g{"x"};
        CHECK(g.eval_q(g.parse("-x^2"), {{"x", 3}}) == -9);
        CHECK(g.eval_q(g.parse("2^3^2"), {}) == 512);
        CHECK(g.eval_q(g.parse("x^-1"), {{"x", 4}}) == Rational(1, 4));
        CHECK(g.eval_q(g.parse("1 - 2 - 3"), {}) == -4);
        CHECK(g.eval_q(g.parse("8 / 4 / 2"), {}) == 1);
        CHECK(g.eval_q(g.parse("0.021/(24*60)"), {}) == Rational(21, 1440000));
        CHECK(g.eval_q(g.parse("1.5e-3"), {}) == Rational(3, 2000));
    }
    SUBCASE("errors") {
        try {
            fx.parse("k12 * q");
            FAIL("expected a parse error");
        } catch (const ParseError& err) {
            CHECK(err.column() == 7);
            CHECK(std::string(err.what()).find("undeclared symbol 'q'") != std::string::npos);
        }
        CHECK_THROWS_AS(fx.parse("k12 +"), ParseError);
        CHECK_THROWS_AS(fx.parse("(k12"), ParseError);
        CHECK_THROWS_AS(fx.parse("x1^x2"), ParseError);
        CHECK_THROWS_AS(fx.parse("foo(x1)"), ParseError);
        CHECK_THROWS_AS(fx.parse("x1 $ 2"), ParseError);
        CHECK_THROWS_AS(fx.parse("x1/0"), ParseError);
    }
}

TEST_CASE("hash-consing") {
    Fixture fx{"a", "b"};
    CHECK(fx.parse("(a+b)*(a+b)") == fx.parse("(a+b)*(a+b)"));
    CHECK(fx.dag.count_nodes(fx.parse("(a+b)*(a+b)")) == 4);
    CHECK(fx.parse("a+b") == fx.parse("b+a"));
}

TEST_CASE("differentiate") {
    Fixture fx{"x", "theta"};
    auto& dag = fx.dag;
    const SymbolId x = *dag.find_symbol("x");
    const SymbolId th = *dag.find_symbol("theta");

    CHECK(dag.differentiate(fx.parse("x^2"), x) == fx.parse("2*x"));
    CHECK(dag.differentiate(fx.parse("theta*x"), th) == fx.parse("x"));
    CHECK(dag.differentiate(fx.parse("theta*x"), *dag.find_symbol("theta")) != dag.zero());
    CHECK(dag.differentiate(fx.parse("theta"), x) == dag.zero());

    SUBCASE("analytic rules at a point") {
        // d/dx log(x) = 1/x, d/dx x^(3/2) = 3/2 x^(1/2): check via rational evaluation
        CHECK(fx.eval_q(dag.differentiate(fx.parse("log(x)"), x), {{"x", 4}}) == Rational(1, 4));
        const NodeId d = dag.differentiate(fx.parse("x^1.5"), x);
        CHECK(dag.node(d).kind == NodeKind::Mul);
    }
}

TEST_CASE("differentiate matches exact Richardson-extrapolated central differences") {
    // For a cubic, D(h) = f' + c h^2 exactly, so (4 D(h/2) - D(h)) / 3 == f'.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        Fixture fx{"x", "y", "z"};
        auto& dag = fx.dag;
        // random polynomial of degree <= 3: sum of random monomials
        NodeId poly = dag.zero();
        for (int term = 0; term < 5; ++term) {
            NodeId mono = dag.constant(Rational(static_cast<int>(rng() % 11) - 5));
            const int degree = static_cast<int>(rng() % 4);
            for (int d = 0; d < degree; ++d) {
                static const char* names[] = {"x", "y", "z"};
                mono = dag.mul(mono, dag.symbol(names[rng() % 3]));
            }
            poly = dag.add(poly, mono);
        }
        const char* wrt_name = (trial % 3 == 0) ? "x" : (trial % 3 == 1 ? "y" : "z");
        const SymbolId wrt = *dag.find_symbol(wrt_name);
        const NodeId deriv = dag.differentiate(poly, wrt);
        std::map<std::string, Rational> at{{"x", Rational(static_cast<int>(rng() % 9) - 4, 3)},
                                           {"y", Rational(static_cast<int>(rng() % 9) - 4, 5)},
                                           {"z", Rational(static_cast<int>(rng() % 9) - 4, 7)}};
        auto central = [&](const Rational& h) {
            auto plus = at;
            auto minus = at;
            plus[wrt_name] += h;
            minus[wrt_name] -= h;
            return (fx.eval_q(poly, plus) - fx.eval_q(poly, minus)) / (2 * h);
        };
        const Rational h(1, 8);
        const Rational richardson = (4 * central(h / 2) - central(h)) / 3;
        CHECK(fx.eval_q(deriv, at) == richardson);
    }
}

TEST_CASE("differentiate is linear") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        ExpressionDag dag;
        const NodeId e1 = random_expression(dag, rng, 4, true);
        const NodeId e2 = random_expression(dag, rng, 4, true);
        const Rational alpha(static_cast<int>(rng() % 13) - 6, 1 + static_cast<int>(rng() % 5));
        const Rational beta(static_cast<int>(rng() % 13) - 6, 1 + static_cast<int>(rng() % 5));
        const SymbolId x = dag.declare("x");
        dag.declare("y");
        dag.declare("z");
        const NodeId lhs =
            dag.differentiate(dag.add(dag.mul(dag.constant(alpha), e1), dag.mul(dag.constant(beta), e2)), x);
        const NodeId rhs = dag.add(dag.mul(dag.constant(alpha), dag.differentiate(e1, x)),
                                   dag.mul(dag.constant(beta), dag.differentiate(e2, x)));
        const PrimeField f(kDefaultPrime);
        for (int point = 0; point < 3; ++point) {
            std::vector<std::uint64_t> env{rng() % 1000 + 1, rng() % 1000 + 1, rng() % 1000 + 1};
            const NodeId roots[] = {lhs, rhs};
            try {
                auto v = evaluate(dag, roots, FieldRing{f}, [&](SymbolId s) { return env.at(s); });
                CHECK(v[0] == v[1]);
            } catch (const ZeroDivisorError&) {
                // unlucky point: a denominator vanished
            }
        }
    }
}

TEST_CASE("substitute") {
    Fixture fx{"theta", "x"};
    auto& dag = fx.dag;
    const NodeId e = fx.parse("theta*x");
    CHECK(dag.substitute(e, {{*dag.find_symbol("theta"), dag.constant(2)}}) == fx.parse("2*x"));
    CHECK(dag.substitute(e, {}) == e);
    CHECK(dag.substitute(fx.parse("theta*x + 1"), {{*dag.find_symbol("theta"), dag.constant(2)},
                                                   {*dag.find_symbol("x"), dag.constant(3)}}) == dag.constant(7));
}

TEST_CASE("evaluate") {
    Fixture fx{"x"};
    CHECK(fx.eval_p(fx.parse("(x^2 + 1)/x"), {{"x", 3}}, 7) == 1);
    CHECK_THROWS_AS(fx.eval_p(fx.parse("log(x)"), {{"x", 3}}, 7), RationalityError);
    CHECK_THROWS_AS(fx.eval_p(fx.parse("1/x"), {{"x", 7}}, 7), ZeroDivisorError);

    SUBCASE("series ring") {
        const NodeId e = fx.parse("1/(1 - x)");
        const NodeId roots[] = {e};
        const TruncatedSeries t(101, {0, 1, 0, 0});
        auto v = evaluate(fx.dag, roots, SeriesRing{PrimeField(101), 4}, [&](SymbolId) { return t; });
        CHECK(v[0] == TruncatedSeries(101, {1, 1, 1, 1}));
    }

    SUBCASE("evaluate commutes with substitute") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 40; ++trial) {
            ExpressionDag dag;
            const NodeId e = random_expression(dag, rng, 5, true);
            const SymbolId x = dag.declare("x");
            const SymbolId y = dag.declare("y");
            const SymbolId z = dag.declare("z");
            const Rational cx(static_cast<int>(rng() % 20) + 1, 3);
            const Rational zv(static_cast<int>(rng() % 20) + 1, 7);
            try {
                const NodeId sub = dag.substitute(e, {{x, dag.constant(cx)}, {y, dag.symbol(z)}});
                const NodeId r1[] = {e};
                const NodeId r2[] = {sub};
                const Rational before = evaluate(dag, r1, RationalRing{}, [&](SymbolId s) {
                    return s == x ? cx : zv;
                })[0];
                const Rational after = evaluate(dag, r2, RationalRing{}, [&](SymbolId) { return zv; })[0];
                CHECK(before == after);
            } catch (const ZeroDivisorError&) {
            }
        }
    }
}

TEST_CASE("rational_normal_form") {
    Fixture fx{"x", "y"};
    auto& dag = fx.dag;
    const PrimeField f(kDefaultPrime);
    auto check_equivalent = [&](NodeId e, std::uint64_t xv, std::uint64_t yv) {
        const RationalForm rf = rational_normal_form(dag, e);
        CHECK(is_rational(dag, rf.numerator));
        for (NodeId part : {rf.numerator, rf.denominator}) {
            for (NodeId id : dag.reachable(std::span<const NodeId>(&part, 1))) {
                CHECK(dag.node(id).kind != NodeKind::Div);
            }
        }
        const NodeId roots[] = {e, rf.numerator, rf.denominator};
        auto v = evaluate(dag, roots, FieldRing{f}, [&](SymbolId s) { return s == 0 ? xv : yv; });
        CHECK(v[0] == f.mul(v[1], f.inv(v[2])));
    };
    check_equivalent(fx.parse("x + 1/x"), 5, 1);
    check_equivalent(fx.parse("1/(1 + 1/(1+x))"), 9, 1);
    const RationalForm nested = rational_normal_form(dag, fx.parse("1/(1 + 1/(1+x))"));
    CHECK(fx.eval_q(nested.numerator, {{"x", 3}}) / fx.eval_q(nested.denominator, {{"x", 3}}) == Rational(4, 5));

    CHECK_THROWS_AS(rational_normal_form(dag, fx.parse("x^0.5 + 1")), RationalityError);
    CHECK_THROWS_AS(rational_normal_form(dag, fx.parse("log(x)")), RationalityError);
    try {
        rational_normal_form(dag, fx.parse("y + x*log(x)"));
    } catch (const RationalityError& err) {
        CHECK(std::string(err.what()).find("log at add.") != std::string::npos);
    }

    SUBCASE("random rational expressions keep their value") {
        std::mt19937_64 rng(14);
        for (int trial = 0; trial < 40; ++trial) {
            ExpressionDag d2;
            const SymbolId x = d2.declare("x");
            d2.declare("y");
            d2.declare("z");
            const NodeId e = random_expression(d2, rng, 5, true);
            RationalForm rf{};
            try {
                rf = rational_normal_form(d2, e);
            } catch (const ZeroDivisorError&) {
                continue; // identically zero denominator
            }
            for (int point = 0; point < 20; ++point) {
                std::vector<std::uint64_t> env{rng() % kDefaultPrime, rng() % kDefaultPrime, rng() % kDefaultPrime};
                const NodeId roots[] = {e, rf.numerator, rf.denominator};
                try {
                    auto v = evaluate(d2, roots, FieldRing{f}, [&](SymbolId s) { return env.at(s); });
                    CHECK(v[0] == f.mul(v[1], f.inv(v[2])));
                } catch (const ZeroDivisorError&) {
                }
            }
            (void)x;
        }
    }
}

TEST_CASE("non_rational_nodes") {
    Fixture fx{"G", "beta", "x"};
    CHECK(non_rational_nodes(fx.dag, fx.parse("x^3 + 2*x - 1")).empty());
    const NodeId big = fx.parse("beta*(0.021/(24*60))/(1+(8.4/G)^1.7) - (0.025/(24*60))/(1+(G/4.8)^8.5)");
    const auto offenders = non_rational_nodes(fx.dag, big);
    REQUIRE(offenders.size() == 2);
    std::set<Rational> exponents;
    for (const auto& o : offenders) {
        CHECK(o.kind == NodeKind::Pow);
        exponents.insert(*o.exponent);
    }
    CHECK(exponents == std::set<Rational>{Rational(17, 10), Rational(17, 2)});

    const auto logs = non_rational_nodes(fx.dag, fx.parse("1 + log(x)"));
    REQUIRE(logs.size() == 1);
    CHECK(logs[0].kind == NodeKind::Log);
    CHECK(logs[0].path == "add.rhs");
}

TEST_CASE("decimal helpers") {
    CHECK(parse_decimal("8.4") == Rational(42, 5));
    CHECK(round_half_even(Rational(17, 10)) == 2);
    CHECK(round_half_even(Rational(17, 2)) == 8);
    CHECK(round_half_even(Rational(15, 2)) == 8);
    CHECK(round_half_even(Rational(-3, 2)) == -2);
    CHECK(round_half_even(Rational(3)) == 3);
}

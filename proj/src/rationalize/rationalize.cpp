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

#include "obsrank/rationalize.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "obsrank/errors.hpp"

namespace obsrank {

namespace {

using Float = boost::multiprecision::cpp_bin_float_50;

Rational to_rational(const Float& x) {
    const BigInt scale = boost::multiprecision::pow(BigInt(10), 30);
    const BigInt n = static_cast<BigInt>(boost::multiprecision::round(x * Float(scale)));
    return Rational(n, scale);
}

Float to_float(const Rational& q) {
    return Float(boost::multiprecision::numerator(q)) / Float(boost::multiprecision::denominator(q));
}

Rational factorial(int k) {
    BigInt f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return Rational(f);
}

std::vector<NodeId> model_roots(const OdeModel& m) {
    std::vector<NodeId> roots = m.dynamics;
    roots.insert(roots.end(), m.outputs.begin(), m.outputs.end());
    return roots;
}

void assign_roots(OdeModel& m, const std::vector<NodeId>& roots) {
    std::copy(roots.begin(), roots.begin() + static_cast<std::ptrdiff_t>(m.dynamics.size()), m.dynamics.begin());
    std::copy(roots.begin() + static_cast<std::ptrdiff_t>(m.dynamics.size()), roots.end(), m.outputs.begin());
}

std::string root_label(const OdeModel& m, std::size_t i) {
    if (i < m.states.size()) return "dynamics[" + m.states[i] + "]";
    return "output[" + std::to_string(i - m.states.size()) + "]";
}

/// First location of every non-rational node reachable from the model roots.
std::unordered_map<NodeId, std::string> locations(const OdeModel& m) {
    std::unordered_map<NodeId, std::string> out;
    const auto roots = model_roots(m);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (const auto& nr : non_rational_nodes(*m.dag, roots[i])) out.try_emplace(nr.node, root_label(m, i) + ":" + nr.path);
    }
    return out;
}

/// Rebuilds the expressions under roots bottom-up. `special` may return a
/// replacement for a node given the already rewritten children.
template <class Special>
std::vector<NodeId> rewrite(ExpressionDag& dag, const std::vector<NodeId>& roots, Special&& special) {
    const std::vector<NodeId> order = dag.reachable(roots);
    std::unordered_map<NodeId, NodeId> map;
    map.reserve(order.size());
    for (NodeId id : order) {
        const Node n = dag.node(id);
        NodeId out = id;
        if (std::optional<NodeId> s = special(id, n, map)) {
            out = *s;
        } else {
            switch (n.kind) {
            case NodeKind::Constant:
            case NodeKind::Symbol: break;
            case NodeKind::Add: out = dag.add(map.at(n.lhs), map.at(n.rhs)); break;
            case NodeKind::Sub: out = dag.sub(map.at(n.lhs), map.at(n.rhs)); break;
            case NodeKind::Mul: out = dag.mul(map.at(n.lhs), map.at(n.rhs)); break;
            case NodeKind::Div: out = dag.div(map.at(n.lhs), map.at(n.rhs)); break;
            case NodeKind::Pow: out = dag.pow(map.at(n.lhs), dag.exponent(id)); break;
            default: out = dag.unary(n.kind, map.at(n.lhs)); break;
            }
        }
        map[id] = out;
    }
    std::vector<NodeId> out;
    out.reserve(roots.size());
    for (NodeId r : roots) out.push_back(map.at(r));
    return out;
}

OdeModel taylor_impl(const OdeModel& m, const std::map<std::string, Rational>& center, int order, bool strict,
                     std::vector<TaylorExpansion>* log, std::map<std::string, Rational>* used_center) {
    if (order < 0) throw Error("Taylor order must be non-negative");
    OdeModel out = m.clone();
    ExpressionDag& dag = *out.dag;
    const auto where = locations(out);

    auto value_of = [&](SymbolId s) -> Rational {
        const std::string& name = dag.symbol_name(s);
        Rational v = 0;
        if (auto it = center.find(name); it != center.end()) {
            v = it->second;
        } else if (auto h = m.initial_hints.find(name); h != m.initial_hints.end()) {
            v = h->second;
        }
        if (used_center) (*used_center)[name] = v;
        return v;
    };

    std::vector<std::string> failures;
    auto special = [&](NodeId id, const Node& n, const std::unordered_map<NodeId, NodeId>& map) -> std::optional<NodeId> {
        if (!is_analytic(n.kind)) return std::nullopt;
        const NodeId arg = map.at(n.lhs);
        const std::string loc = where.count(id) ? where.at(id) : std::string(kind_name(n.kind));
        std::string note;
        std::optional<Rational> a;
        try {
            const NodeId roots[] = {arg};
            a = evaluate(dag, std::span<const NodeId>(roots), RationalRing{}, value_of)[0];
        } catch (const ZeroDivisorError&) {
            note = "argument undefined at the center";
        }
        if (a && n.kind == NodeKind::Log && *a <= 0) {
            note = "log argument " + to_string(*a) + " at the center";
            a.reset();
        }
        if (!a) {
            if (strict) {
                failures.push_back(loc + ": " + note);
                return dag.zero();
            }
            a = n.kind == NodeKind::Log ? Rational(1) : Rational(0);
            note += "; expanded about " + to_string(*a);
        }
        bool exact = true;
        const std::vector<Rational> c = taylor_coefficients(n.kind, *a, order, &exact);
        const NodeId h = dag.sub(arg, dag.constant(*a));
        NodeId poly = dag.zero();
        for (int k = 0; k <= order; ++k) {
            if (c[static_cast<std::size_t>(k)] == 0) continue;
            poly = dag.add(poly, dag.mul(dag.constant(c[static_cast<std::size_t>(k)]), dag.pow(h, Rational(k))));
        }
        if (log) log->push_back({loc, n.kind, *a, order, exact, note});
        return poly;
    };
    assign_roots(out, rewrite(dag, model_roots(out), special));
    if (!failures.empty()) {
        std::string msg = "cannot expand about the requested center:";
        for (const auto& f : failures) msg += "\n  " + f;
        throw RationalityError(msg);
    }
    return out;
}

} // namespace

std::vector<Rational> taylor_coefficients(NodeKind kind, const Rational& a, int order, bool* exact) {
    if (order < 0) throw Error("Taylor order must be non-negative");
    const auto n = static_cast<std::size_t>(order) + 1;
    std::vector<Rational> c(n, Rational(0));
    bool is_exact = true;
    auto approx = [&](const Float& x) {
        is_exact = false;
        return to_rational(x);
    };
    const Float af = to_float(a);
    switch (kind) {
    case NodeKind::Log: {
        if (a <= 0) throw RationalityError("log is not analytic at " + to_string(a));
        c[0] = a == 1 ? Rational(0) : approx(boost::multiprecision::log(af));
        Rational apow = 1;
        for (std::size_t k = 1; k < n; ++k) {
            apow *= a;
            c[k] = Rational(k % 2 ? 1 : -1) / (Rational(static_cast<long long>(k)) * apow);
        }
        break;
    }
    case NodeKind::Exp: {
        const Rational e = a == 0 ? Rational(1) : approx(boost::multiprecision::exp(af));
        for (std::size_t k = 0; k < n; ++k) c[k] = e / factorial(static_cast<int>(k));
        break;
    }
    case NodeKind::Sin:
    case NodeKind::Cos: {
        const Rational s = a == 0 ? Rational(0) : approx(boost::multiprecision::sin(af));
        const Rational co = a == 0 ? Rational(1) : approx(boost::multiprecision::cos(af));
        // Derivative cycle of sin starting at sin: s, co, -s, -co.
        const Rational cyc_sin[4] = {s, co, -s, -co};
        const Rational cyc_cos[4] = {co, -s, -co, s};
        const Rational* cyc = kind == NodeKind::Sin ? cyc_sin : cyc_cos;
        for (std::size_t k = 0; k < n; ++k) c[k] = cyc[k % 4] / factorial(static_cast<int>(k));
        break;
    }
    case NodeKind::Tan: {
        if (a != 0 && boost::multiprecision::cos(af) == 0) throw RationalityError("tan is not analytic at " + to_string(a));
        c[0] = a == 0 ? Rational(0) : approx(boost::multiprecision::tan(af));
        // tan' = 1 + tan^2 gives (k+1) c_{k+1} = [k == 0] + sum_{i+j=k} c_i c_j.
        for (std::size_t k = 0; k + 1 < n; ++k) {
            Rational s = k == 0 ? Rational(1) : Rational(0);
            for (std::size_t i = 0; i <= k; ++i) s += c[i] * c[k - i];
            c[k + 1] = s / Rational(static_cast<long long>(k + 1));
        }
        break;
    }
    default: throw Error(std::string("no Taylor expansion for ") + kind_name(kind));
    }
    if (exact) *exact = is_exact;
    return c;
}

std::pair<OdeModel, std::vector<ExponentChange>> round_exponents(const OdeModel& m) {
    OdeModel out = m.clone();
    ExpressionDag& dag = *out.dag;
    const auto where = locations(out);
    std::vector<ExponentChange> changes;
    auto special = [&](NodeId id, const Node& n, const std::unordered_map<NodeId, NodeId>& map) -> std::optional<NodeId> {
        if (n.kind != NodeKind::Pow) return std::nullopt;
        const Rational q = dag.exponent(id);
        if (boost::multiprecision::denominator(q) == 1) return std::nullopt;
        const BigInt r = round_half_even(q);
        const bool tie = boost::multiprecision::abs(q - Rational(r)) == Rational(1, 2);
        changes.push_back({where.count(id) ? where.at(id) : std::string("pow"), q, r, tie});
        return dag.pow(map.at(n.lhs), Rational(r));
    };
    assign_roots(out, rewrite(dag, model_roots(out), special));
    return {std::move(out), std::move(changes)};
}

OdeModel taylor_substitute(const OdeModel& m, const std::map<std::string, Rational>& center, int order,
                           std::vector<TaylorExpansion>* log) {
    return taylor_impl(m, center, order, !center.empty(), log, nullptr);
}

std::pair<OdeModel, RationalizationReport> rationalize_model(const OdeModel& m, const RationalizeOptions& options) {
    RationalizationReport report;
    report.taylor_order = options.taylor_order;
    bool rational = true;
    for (NodeId r : model_roots(m)) rational = rational && is_rational(*m.dag, r);
    if (rational) return {m, std::move(report)};

    auto [rounded, changes] = round_exponents(m);
    report.exponents = std::move(changes);
    OdeModel out = taylor_impl(rounded, options.center, options.taylor_order, !options.center.empty(), &report.expansions,
                               &report.center);
    for (NodeId r : model_roots(out)) {
        const auto bad = non_rational_nodes(*out.dag, r);
        if (!bad.empty()) throw RationalityError(std::string("rationalization left a ") + kind_name(bad[0].kind) +
                                                 " node at " + bad[0].path);
    }
    return {std::move(out), std::move(report)};
}

std::vector<std::string> RationalizationReport::caveats() const {
    std::vector<std::string> out;
    for (const auto& e : exponents) {
        std::ostringstream s;
        s << "exponent " << to_string(e.original) << " rounded to " << e.rounded.str() << " at " << e.location;
        if (e.tie) s << " (tie, rounded half to even)";
        out.push_back(s.str());
    }
    for (const auto& t : expansions) {
        std::ostringstream s;
        s << kind_name(t.kind) << " replaced by its order " << t.order << " Taylor polynomial about " << to_string(t.center)
          << " at " << t.location;
        if (!t.exact) s << " (rounded coefficients)";
        if (!t.note.empty()) s << " [" << t.note << "]";
        out.push_back(s.str());
    }
    return out;
}

} // namespace obsrank

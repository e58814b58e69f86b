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

#include <unordered_map>

#include "obsrank/expr.hpp"

namespace obsrank {

namespace {

std::string child_step(NodeKind parent, bool rhs) {
    std::string s = kind_name(parent);
    if (parent == NodeKind::Pow || is_analytic(parent)) return s + ".arg";
    return s + (rhs ? ".rhs" : ".lhs");
}

std::string join(const std::string& path, const std::string& step) { return path.empty() ? step : path + "/" + step; }

} // namespace

std::vector<NonRationalNode> non_rational_nodes(const ExpressionDag& dag, NodeId e) {
    // Depth-first from the root so each offender gets the first path that
    // reaches it.
    std::vector<NonRationalNode> out;
    std::unordered_map<NodeId, bool> visited;
    struct Frame {
        NodeId id;
        std::string path;
    };
    std::vector<Frame> stack{{e, ""}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (!visited.emplace(f.id, true).second) continue;
        const Node& n = dag.node(f.id);
        if (is_analytic(n.kind)) {
            out.push_back({f.id, n.kind, std::nullopt, f.path.empty() ? "root" : f.path});
        } else if (n.kind == NodeKind::Pow && boost::multiprecision::denominator(dag.exponent(f.id)) != 1) {
            out.push_back({f.id, n.kind, dag.exponent(f.id), f.path.empty() ? "root" : f.path});
        }
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Symbol: break;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
            stack.push_back({n.rhs, join(f.path, child_step(n.kind, true))});
            stack.push_back({n.lhs, join(f.path, child_step(n.kind, false))});
            break;
        default: stack.push_back({n.lhs, join(f.path, child_step(n.kind, false))}); break;
        }
    }
    return out;
}

RationalForm rational_normal_form(ExpressionDag& dag, NodeId e) {
    const auto offenders = non_rational_nodes(dag, e);
    if (!offenders.empty()) {
        const auto& o = offenders.front();
        std::string what = kind_name(o.kind);
        if (o.exponent) what += " with exponent " + to_string(*o.exponent);
        throw RationalityError("expression is not rational: " + what + " at " + o.path + " in " + dag.to_string(e));
    }
    const std::vector<NodeId> order = dag.reachable(std::span<const NodeId>(&e, 1));
    std::unordered_map<NodeId, RationalForm> form;
    form.reserve(order.size());
    for (NodeId id : order) {
        const Node n = dag.node(id);
        RationalForm r{id, dag.one()};
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Symbol: break;
        case NodeKind::Add:
        case NodeKind::Sub: {
            const RationalForm a = form.at(n.lhs);
            const RationalForm b = form.at(n.rhs);
            auto combine = [&](NodeId x, NodeId y) {
                return n.kind == NodeKind::Add ? dag.add(x, y) : dag.sub(x, y);
            };
            if (a.denominator == b.denominator) {
                r = {combine(a.numerator, b.numerator), a.denominator};
            } else {
                r = {combine(dag.mul(a.numerator, b.denominator), dag.mul(b.numerator, a.denominator)),
                     dag.mul(a.denominator, b.denominator)};
            }
            break;
        }
        case NodeKind::Mul: {
            const RationalForm a = form.at(n.lhs);
            const RationalForm b = form.at(n.rhs);
            r = {dag.mul(a.numerator, b.numerator), dag.mul(a.denominator, b.denominator)};
            break;
        }
        case NodeKind::Div: {
            const RationalForm a = form.at(n.lhs);
            const RationalForm b = form.at(n.rhs);
            r = {dag.mul(a.numerator, b.denominator), dag.mul(a.denominator, b.numerator)};
            break;
        }
        case NodeKind::Pow: {
            // Non-negative integer exponent: negative ones were rewritten at construction.
            const Rational q = dag.exponent(id);
            const RationalForm a = form.at(n.lhs);
            r = {dag.pow(a.numerator, q), dag.pow(a.denominator, q)};
            break;
        }
        default: break; // unreachable: rejected above
        }
        form.emplace(id, r);
    }
    const RationalForm result = form.at(e);
    if (dag.is_zero(result.denominator)) throw ZeroDivisorError("denominator is identically zero in " + dag.to_string(e));
    return result;
}

} // namespace obsrank

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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "obsrank/errors.hpp"

namespace obsrank {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact value of a decimal literal such as "0.021", "12" or "1.5e-3".
Rational parse_decimal(std::string_view text);

/// Round-half-to-even.
BigInt round_half_even(const Rational& q);

std::string to_string(const Rational& q);

using NodeId = std::uint32_t;
using SymbolId = std::uint32_t;

enum class NodeKind : std::uint8_t { Constant, Symbol, Add, Sub, Mul, Div, Pow, Log, Exp, Sin, Cos, Tan };

const char* kind_name(NodeKind kind) noexcept;
bool is_analytic(NodeKind kind) noexcept;

/// One DAG record. Children always have smaller ids than their parent.
///   Constant: lhs = index into the constant table
///   Symbol:   lhs = symbol id
///   Pow:      lhs = base, rhs = index of the exponent in the constant table
///   unary:    lhs = argument
struct Node {
    NodeKind kind;
    std::uint32_t lhs;
    std::uint32_t rhs;
    /// Bit (s mod 64) is set when symbol s may occur below this node.
    std::uint64_t symbol_mask;
};

/// Hash-consed expression DAG shared by all formulas of a model.
///
/// Every constructor folds constants and drops neutral elements (e+0, e*1,
/// e*0, e^1, e^0); add and mul order their operands so that a+b and b+a
/// share a node. Nothing else is simplified.
class ExpressionDag {
public:
    ExpressionDag();

    SymbolId declare(const std::string& name);
    std::optional<SymbolId> find_symbol(std::string_view name) const;
    const std::string& symbol_name(SymbolId s) const { return symbol_names_.at(s); }
    std::size_t symbol_count() const noexcept { return symbol_names_.size(); }

    NodeId constant(const Rational& value);
    NodeId zero() const noexcept { return zero_; }
    NodeId one() const noexcept { return one_; }
    NodeId symbol(SymbolId s);
    NodeId symbol(const std::string& name) { return symbol(declare(name)); }

    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId div(NodeId a, NodeId b);
    NodeId neg(NodeId a);
    /// Negative integer exponents become 1 / base^|q|.
    NodeId pow(NodeId base, const Rational& exponent);
    NodeId unary(NodeKind kind, NodeId arg);

    std::size_t size() const noexcept { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    bool is_constant(NodeId id) const noexcept { return nodes_[id].kind == NodeKind::Constant; }
    bool is_zero(NodeId id) const noexcept { return id == zero_; }
    const Rational& constant_value(NodeId id) const;
    const Rational& exponent(NodeId pow_node) const;
    SymbolId symbol_of(NodeId symbol_node) const;

    /// False means s certainly does not occur below id.
    bool may_depend_on(NodeId id, SymbolId s) const noexcept {
        return (nodes_[id].symbol_mask >> (s % 64U)) & 1U;
    }

    /// Exact partial derivative. Results are memoized per (node, symbol).
    NodeId differentiate(NodeId e, SymbolId wrt);

    /// Simultaneous substitution of symbols, with constant folding.
    NodeId substitute(NodeId e, const std::unordered_map<SymbolId, NodeId>& bindings);

    /// All nodes reachable from roots, in increasing (topological) order.
    std::vector<NodeId> reachable(std::span<const NodeId> roots) const;

    /// Nodes reachable from e.
    std::size_t count_nodes(NodeId e) const;

    std::string to_string(NodeId e) const;

    /// Creating a node beyond `limit` nodes throws BudgetExceededError.
    void set_node_limit(std::size_t limit) noexcept { node_limit_ = limit; }
    /// Called every few thousand node creations; may throw to abort.
    void set_interrupt(std::function<void()> hook) { interrupt_ = std::move(hook); }

private:
    struct Key {
        NodeKind kind;
        std::uint32_t lhs;
        std::uint32_t rhs;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    NodeId intern(NodeKind kind, std::uint32_t lhs, std::uint32_t rhs);
    std::uint32_t constant_index(const Rational& value);
    std::optional<Rational> folded(NodeId id) const;
    NodeId differentiate_uncached(NodeId e, SymbolId wrt);

    std::vector<Node> nodes_;
    std::unordered_map<Key, NodeId, KeyHash> table_;
    std::vector<Rational> constants_;
    std::map<Rational, std::uint32_t> constant_ids_;
    std::vector<std::string> symbol_names_;
    std::unordered_map<std::string, SymbolId> symbol_ids_;
    std::unordered_map<std::uint64_t, NodeId> diff_memo_;
    NodeId zero_ = 0;
    NodeId one_ = 0;
    std::size_t node_limit_ = 0;
    std::function<void()> interrupt_;
};

/// Names visible to the parser: declared symbols and named constants both
/// resolve to nodes.
using SymbolTable = std::unordered_map<std::string, NodeId>;

/// Parses an infix expression. Precedence: ^ (right-assoc) > unary minus >
/// * / > + -. Functions: log, exp, sin, cos, tan. `line` and `column` locate
/// the text inside an enclosing file for error messages.
NodeId parse_expression(ExpressionDag& dag, std::string_view text, const SymbolTable& symbols, int line = 1,
                        int column = 1);

/// Numerator and denominator of a rational expression, both free of
/// division, analytic functions and non-integer powers.
struct RationalForm {
    NodeId numerator;
    NodeId denominator;
};

struct NonRationalNode {
    NodeId node;
    NodeKind kind;
    /// Set for pow nodes.
    std::optional<Rational> exponent;
    /// Child path from the root, e.g. "sub.lhs/mul.rhs/div.rhs".
    std::string path;
};

/// Lists nodes that make e non-rational: analytic functions and pow nodes
/// with a non-integer exponent. Each offending node is reported once.
std::vector<NonRationalNode> non_rational_nodes(const ExpressionDag& dag, NodeId e);

inline bool is_rational(const ExpressionDag& dag, NodeId e) { return non_rational_nodes(dag, e).empty(); }

/// Throws RationalityError naming the offending node and its path.
RationalForm rational_normal_form(ExpressionDag& dag, NodeId e);

/// Value domain used by evaluate(). A Ring provides
///   Value from_rational(const Rational&)
///   Value add/sub/mul/div(const Value&, const Value&)
///   Value pow(const Value&, const Rational& exponent)
///   Value analytic(NodeKind, const Value&)
template <class Ring>
concept EvaluationRing = requires(const Ring& r, const typename Ring::Value& v, const Rational& q, NodeKind k) {
    { r.from_rational(q) } -> std::convertible_to<typename Ring::Value>;
    { r.add(v, v) } -> std::convertible_to<typename Ring::Value>;
    { r.sub(v, v) } -> std::convertible_to<typename Ring::Value>;
    { r.mul(v, v) } -> std::convertible_to<typename Ring::Value>;
    { r.div(v, v) } -> std::convertible_to<typename Ring::Value>;
    { r.pow(v, q) } -> std::convertible_to<typename Ring::Value>;
    { r.analytic(k, v) } -> std::convertible_to<typename Ring::Value>;
};

/// Single bottom-up pass over the nodes reachable from roots; each shared
/// node is evaluated once. `symbol_value(SymbolId)` supplies leaves. A ring
/// with a `constant(NodeId)` member supplies constants by node instead of
/// converting them with from_rational.
template <EvaluationRing Ring, class SymbolFn>
std::vector<typename Ring::Value> evaluate(const ExpressionDag& dag, std::span<const NodeId> roots, const Ring& ring,
                                           SymbolFn&& symbol_value) {
    using Value = typename Ring::Value;
    const std::vector<NodeId> order = dag.reachable(roots);
    std::vector<std::uint32_t> slot(dag.size(), 0);
    std::vector<Value> values;
    values.reserve(order.size());
    auto at = [&](NodeId id) -> const Value& { return values[slot[id]]; };
    for (NodeId id : order) {
        const Node& n = dag.node(id);
        switch (n.kind) {
        case NodeKind::Constant:
            if constexpr (requires { ring.constant(id); }) {
                values.push_back(ring.constant(id));
            } else {
                values.push_back(ring.from_rational(dag.constant_value(id)));
            }
            break;
        case NodeKind::Symbol: values.push_back(symbol_value(static_cast<SymbolId>(n.lhs))); break;
        case NodeKind::Add: values.push_back(ring.add(at(n.lhs), at(n.rhs))); break;
        case NodeKind::Sub: values.push_back(ring.sub(at(n.lhs), at(n.rhs))); break;
        case NodeKind::Mul: values.push_back(ring.mul(at(n.lhs), at(n.rhs))); break;
        case NodeKind::Div: values.push_back(ring.div(at(n.lhs), at(n.rhs))); break;
        case NodeKind::Pow: values.push_back(ring.pow(at(n.lhs), dag.exponent(id))); break;
        default: values.push_back(ring.analytic(n.kind, at(n.lhs))); break;
        }
        slot[id] = static_cast<std::uint32_t>(values.size() - 1);
    }
    std::vector<Value> out;
    out.reserve(roots.size());
    for (NodeId r : roots) out.push_back(at(r));
    return out;
}

/// Exact evaluation over Q. Analytic nodes and non-integer powers throw
/// RationalityError; division by zero throws ZeroDivisorError.
struct RationalRing {
    using Value = Rational;
    Value from_rational(const Rational& q) const { return q; }
    Value add(const Value& a, const Value& b) const { return a + b; }
    Value sub(const Value& a, const Value& b) const { return a - b; }
    Value mul(const Value& a, const Value& b) const { return a * b; }
    Value div(const Value& a, const Value& b) const;
    Value pow(const Value& a, const Rational& q) const;
    Value analytic(NodeKind k, const Value& a) const;
};

} // namespace obsrank

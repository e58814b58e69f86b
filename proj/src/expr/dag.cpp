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

#include <algorithm>
#include <cctype>
#include <sstream>

#include "obsrank/expr.hpp"

namespace obsrank {

Rational parse_decimal(std::string_view text) {
    BigInt mantissa = 0;
    long long scale = 0;
    bool seen_digit = false;
    bool seen_point = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) --scale;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw Error("malformed number '" + std::string(text) + "'");
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw Error("malformed number '" + std::string(text) + "'");
        ++i;
        bool negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
        if (i == text.size()) throw Error("malformed exponent in '" + std::string(text) + "'");
        long long e = 0;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])) || e > 100000)
                throw Error("malformed exponent in '" + std::string(text) + "'");
            e = e * 10 + (text[i] - '0');
        }
        scale += negative ? -e : e;
    }
    BigInt ten_pow = 1;
    for (long long k = 0; k < (scale < 0 ? -scale : scale); ++k) ten_pow *= 10;
    return scale < 0 ? Rational(mantissa, ten_pow) : Rational(mantissa * ten_pow);
}

BigInt round_half_even(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    // floor division
    BigInt fl = num / den;
    if (num % den != 0 && num < 0) fl -= 1;
    const Rational frac = q - Rational(fl);
    const Rational half(1, 2);
    if (frac > half) return fl + 1;
    if (frac < half) return fl;
    return (fl % 2 == 0) ? fl : fl + 1;
}

std::string to_string(const Rational& q) {
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

const char* kind_name(NodeKind kind) noexcept {
    switch (kind) {
    case NodeKind::Constant: return "constant";
    case NodeKind::Symbol: return "symbol";
    case NodeKind::Add: return "add";
    case NodeKind::Sub: return "sub";
    case NodeKind::Mul: return "mul";
    case NodeKind::Div: return "div";
    case NodeKind::Pow: return "pow";
    case NodeKind::Log: return "log";
    case NodeKind::Exp: return "exp";
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Tan: return "tan";
    }
    return "?";
}

bool is_analytic(NodeKind kind) noexcept {
    return kind == NodeKind::Log || kind == NodeKind::Exp || kind == NodeKind::Sin || kind == NodeKind::Cos ||
           kind == NodeKind::Tan;
}

std::size_t ExpressionDag::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(k.lhs) << 32U) ^ k.rhs;
    h ^= static_cast<std::uint64_t>(k.kind) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 33U;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33U;
    return static_cast<std::size_t>(h);
}

ExpressionDag::ExpressionDag() {
    zero_ = constant(Rational(0));
    one_ = constant(Rational(1));
}

SymbolId ExpressionDag::declare(const std::string& name) {
    auto it = symbol_ids_.find(name);
    if (it != symbol_ids_.end()) return it->second;
    const auto id = static_cast<SymbolId>(symbol_names_.size());
    symbol_names_.push_back(name);
    symbol_ids_.emplace(name, id);
    return id;
}

std::optional<SymbolId> ExpressionDag::find_symbol(std::string_view name) const {
    auto it = symbol_ids_.find(std::string(name));
    if (it == symbol_ids_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t ExpressionDag::constant_index(const Rational& value) {
    auto it = constant_ids_.find(value);
    if (it != constant_ids_.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(constants_.size());
    constants_.push_back(value);
    constant_ids_.emplace(value, idx);
    return idx;
}

NodeId ExpressionDag::intern(NodeKind kind, std::uint32_t lhs, std::uint32_t rhs) {
    const Key key{kind, lhs, rhs};
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    if (node_limit_ != 0 && nodes_.size() >= node_limit_) {
        throw BudgetExceededError("expression DAG exceeded its budget of " + std::to_string(node_limit_) + " nodes");
    }
    if (interrupt_ && (nodes_.size() & 0xFFFU) == 0) interrupt_();
    std::uint64_t mask = 0;
    switch (kind) {
    case NodeKind::Constant: break;
    case NodeKind::Symbol: mask = 1ULL << (lhs % 64U); break;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: mask = nodes_[lhs].symbol_mask | nodes_[rhs].symbol_mask; break;
    default: mask = nodes_[lhs].symbol_mask; break;
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{kind, lhs, rhs, mask});
    table_.emplace(key, id);
    return id;
}

NodeId ExpressionDag::constant(const Rational& value) {
    return intern(NodeKind::Constant, constant_index(value), 0);
}

NodeId ExpressionDag::symbol(SymbolId s) {
    if (s >= symbol_names_.size()) throw Error("unknown symbol id " + std::to_string(s));
    return intern(NodeKind::Symbol, s, 0);
}

const Rational& ExpressionDag::constant_value(NodeId id) const {
    const Node& n = nodes_.at(id);
    if (n.kind != NodeKind::Constant) throw Error("node " + std::to_string(id) + " is not a constant");
    return constants_[n.lhs];
}

const Rational& ExpressionDag::exponent(NodeId pow_node) const {
    const Node& n = nodes_.at(pow_node);
    if (n.kind != NodeKind::Pow) throw Error("node " + std::to_string(pow_node) + " is not a power");
    return constants_[n.rhs];
}

SymbolId ExpressionDag::symbol_of(NodeId symbol_node) const {
    const Node& n = nodes_.at(symbol_node);
    if (n.kind != NodeKind::Symbol) throw Error("node " + std::to_string(symbol_node) + " is not a symbol");
    return n.lhs;
}

std::optional<Rational> ExpressionDag::folded(NodeId id) const {
    if (nodes_[id].kind != NodeKind::Constant) return std::nullopt;
    return constants_[nodes_[id].lhs];
}

NodeId ExpressionDag::add(NodeId a, NodeId b) {
    if (a == zero_) return b;
    if (b == zero_) return a;
    auto ca = folded(a);
    auto cb = folded(b);
    if (ca && cb) return constant(*ca + *cb);
    if (a > b) std::swap(a, b);
    return intern(NodeKind::Add, a, b);
}

NodeId ExpressionDag::sub(NodeId a, NodeId b) {
    if (b == zero_) return a;
    if (a == b) return zero_;
    auto ca = folded(a);
    auto cb = folded(b);
    if (ca && cb) return constant(*ca - *cb);
    if (a == zero_) return neg(b);
    return intern(NodeKind::Sub, a, b);
}

NodeId ExpressionDag::mul(NodeId a, NodeId b) {
    if (a == zero_ || b == zero_) return zero_;
    if (a == one_) return b;
    if (b == one_) return a;
    auto ca = folded(a);
    auto cb = folded(b);
    if (ca && cb) return constant(*ca * *cb);
    if (a > b) std::swap(a, b);
    return intern(NodeKind::Mul, a, b);
}

NodeId ExpressionDag::div(NodeId a, NodeId b) {
    if (b == zero_) throw ZeroDivisorError("division by the constant zero");
    if (a == zero_) return zero_;
    if (b == one_) return a;
    if (a == b) return one_;
    auto ca = folded(a);
    auto cb = folded(b);
    if (ca && cb) return constant(*ca / *cb);
    return intern(NodeKind::Div, a, b);
}

NodeId ExpressionDag::neg(NodeId a) {
    if (auto ca = folded(a)) return constant(-*ca);
    return mul(constant(Rational(-1)), a);
}

NodeId ExpressionDag::pow(NodeId base, const Rational& q) {
    if (q == 0) return one_;
    if (q == 1) return base;
    const bool integral = boost::multiprecision::denominator(q) == 1;
    if (integral && q < 0) return div(one_, pow(base, -q));
    if (auto cb = folded(base)) {
        if (integral) {
            if (*cb == 0) return zero_;
            const BigInt e = boost::multiprecision::numerator(q);
            if (e > 4096) throw Error("constant power with exponent " + e.str() + " is too large to fold");
            Rational r(1);
            for (BigInt k = 0; k < e; ++k) r *= *cb;
            return constant(r);
        }
        if (*cb == 1) return one_;
    }
    return intern(NodeKind::Pow, base, constant_index(q));
}

NodeId ExpressionDag::unary(NodeKind kind, NodeId arg) {
    if (!is_analytic(kind)) throw Error(std::string("not a unary function: ") + kind_name(kind));
    if (auto c = folded(arg)) {
        if (kind == NodeKind::Log && *c == 1) return zero_;
        if (kind == NodeKind::Exp && *c == 0) return one_;
        if ((kind == NodeKind::Sin || kind == NodeKind::Tan) && *c == 0) return zero_;
        if (kind == NodeKind::Cos && *c == 0) return one_;
    }
    return intern(kind, arg, 0);
}

NodeId ExpressionDag::differentiate(NodeId e, SymbolId wrt) {
    if (!may_depend_on(e, wrt)) return zero_;
    const std::uint64_t key = (static_cast<std::uint64_t>(e) << 24U) | wrt;
    if (auto it = diff_memo_.find(key); it != diff_memo_.end()) return it->second;
    const NodeId d = differentiate_uncached(e, wrt);
    diff_memo_.emplace(key, d);
    return d;
}

NodeId ExpressionDag::differentiate_uncached(NodeId e, SymbolId wrt) {
    // Copy: recursive calls may reallocate nodes_.
    const Node n = nodes_[e];
    switch (n.kind) {
    case NodeKind::Constant: return zero_;
    case NodeKind::Symbol: return n.lhs == wrt ? one_ : zero_;
    case NodeKind::Add: return add(differentiate(n.lhs, wrt), differentiate(n.rhs, wrt));
    case NodeKind::Sub: return sub(differentiate(n.lhs, wrt), differentiate(n.rhs, wrt));
    case NodeKind::Mul: {
        const NodeId da = differentiate(n.lhs, wrt);
        const NodeId db = differentiate(n.rhs, wrt);
        return add(mul(da, n.rhs), mul(n.lhs, db));
    }
    case NodeKind::Div: {
        const NodeId da = differentiate(n.lhs, wrt);
        const NodeId db = differentiate(n.rhs, wrt);
        if (db == zero_) return div(da, n.rhs);
        return div(sub(mul(da, n.rhs), mul(n.lhs, db)), pow(n.rhs, Rational(2)));
    }
    case NodeKind::Pow: {
        const Rational q = constants_[n.rhs];
        const NodeId db = differentiate(n.lhs, wrt);
        return mul(mul(constant(q), pow(n.lhs, q - 1)), db);
    }
    case NodeKind::Log: return div(differentiate(n.lhs, wrt), n.lhs);
    case NodeKind::Exp: return mul(e, differentiate(n.lhs, wrt));
    case NodeKind::Sin: return mul(unary(NodeKind::Cos, n.lhs), differentiate(n.lhs, wrt));
    case NodeKind::Cos: return mul(neg(unary(NodeKind::Sin, n.lhs)), differentiate(n.lhs, wrt));
    case NodeKind::Tan: return mul(add(one_, pow(e, Rational(2))), differentiate(n.lhs, wrt));
    }
    return zero_;
}

NodeId ExpressionDag::substitute(NodeId e, const std::unordered_map<SymbolId, NodeId>& bindings) {
    if (bindings.empty()) return e;
    std::vector<NodeId> order = reachable(std::span<const NodeId>(&e, 1));
    std::unordered_map<NodeId, NodeId> image;
    image.reserve(order.size());
    for (NodeId id : order) {
        const Node n = nodes_[id];
        NodeId r = id;
        switch (n.kind) {
        case NodeKind::Constant: break;
        case NodeKind::Symbol: {
            auto it = bindings.find(n.lhs);
            if (it != bindings.end()) r = it->second;
            break;
        }
        case NodeKind::Add: r = add(image.at(n.lhs), image.at(n.rhs)); break;
        case NodeKind::Sub: r = sub(image.at(n.lhs), image.at(n.rhs)); break;
        case NodeKind::Mul: r = mul(image.at(n.lhs), image.at(n.rhs)); break;
        case NodeKind::Div: r = div(image.at(n.lhs), image.at(n.rhs)); break;
        case NodeKind::Pow: r = pow(image.at(n.lhs), constants_[n.rhs]); break;
        default: r = unary(n.kind, image.at(n.lhs)); break;
        }
        image.emplace(id, r);
    }
    return image.at(e);
}

std::vector<NodeId> ExpressionDag::reachable(std::span<const NodeId> roots) const {
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<NodeId> stack(roots.begin(), roots.end());
    std::vector<NodeId> out;
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        out.push_back(id);
        const Node& n = nodes_[id];
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Symbol: break;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
            stack.push_back(n.lhs);
            stack.push_back(n.rhs);
            break;
        default: stack.push_back(n.lhs); break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t ExpressionDag::count_nodes(NodeId e) const { return reachable(std::span<const NodeId>(&e, 1)).size(); }

std::string ExpressionDag::to_string(NodeId e) const {
    const std::vector<NodeId> order = reachable(std::span<const NodeId>(&e, 1));
    std::unordered_map<NodeId, std::pair<std::string, int>> text;
    auto wrap = [&](NodeId child, int min_prec, bool strict) {
        const auto& [s, p] = text.at(child);
        return (p < min_prec || (strict && p == min_prec)) ? "(" + s + ")" : s;
    };
    for (NodeId id : order) {
        const Node& n = nodes_[id];
        std::string s;
        int p = 5;
        switch (n.kind) {
        case NodeKind::Constant: {
            const Rational& q = constants_[n.lhs];
            s = obsrank::to_string(q);
            if (q < 0 || boost::multiprecision::denominator(q) != 1) p = 2;
            if (q < 0) p = 0;
            break;
        }
        case NodeKind::Symbol: s = symbol_names_[n.lhs]; break;
        case NodeKind::Add: s = wrap(n.lhs, 1, false) + " + " + wrap(n.rhs, 1, false); p = 1; break;
        case NodeKind::Sub: s = wrap(n.lhs, 1, false) + " - " + wrap(n.rhs, 1, true); p = 1; break;
        case NodeKind::Mul: s = wrap(n.lhs, 2, false) + "*" + wrap(n.rhs, 2, false); p = 2; break;
        case NodeKind::Div: s = wrap(n.lhs, 2, false) + "/" + wrap(n.rhs, 2, true); p = 2; break;
        case NodeKind::Pow: {
            const Rational& q = constants_[n.rhs];
            std::string qs = obsrank::to_string(q);
            if (boost::multiprecision::denominator(q) != 1) qs = "(" + qs + ")";
            s = wrap(n.lhs, 5, false) + "^" + qs;
            p = 4;
            break;
        }
        default: s = std::string(kind_name(n.kind)) + "(" + text.at(n.lhs).first + ")"; break;
        }
        text.emplace(id, std::make_pair(std::move(s), p));
    }
    return text.at(e).first;
}

RationalRing::Value RationalRing::div(const Value& a, const Value& b) const {
    if (b == 0) throw ZeroDivisorError("rational division by zero");
    return a / b;
}

RationalRing::Value RationalRing::pow(const Value& a, const Rational& q) const {
    if (boost::multiprecision::denominator(q) != 1) throw RationalityError("non-integer power over the rationals");
    BigInt e = boost::multiprecision::numerator(q);
    Value base = a;
    if (e < 0) {
        base = div(Value(1), a);
        e = -e;
    }
    Value r(1);
    while (e != 0) {
        if ((e & 1) != 0) r *= base;
        e >>= 1;
        if (e != 0) base *= base;
    }
    return r;
}

RationalRing::Value RationalRing::analytic(NodeKind k, const Value&) const {
    throw RationalityError(std::string("cannot evaluate ") + kind_name(k) + " over the rationals");
}

} // namespace obsrank

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

#include <cctype>

#include "obsrank/expr.hpp"

namespace obsrank {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t pos;
};

class Parser {
public:
    Parser(ExpressionDag& dag, std::string_view text, const SymbolTable& symbols, int line, int column)
        : dag_(dag), text_(text), symbols_(symbols), line_(line), column_(column) {
        advance();
    }

    NodeId parse() {
        NodeId e = expression();
        if (tok_.kind != Tok::End) fail("unexpected '" + std::string(tok_.text) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { fail_at(message, tok_.pos); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t pos) const {
        throw ParseError(message, line_, column_ + static_cast<int>(pos));
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ == text_.size()) {
            tok_ = {Tok::End, {}, start};
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t look = pos_ + 1;
                if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
                if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                    pos_ = look;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
                }
            }
            tok_ = {Tok::Number, text_.substr(start, pos_ - start), start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            tok_ = {Tok::Ident, text_.substr(start, pos_ - start), start};
            return;
        }
        ++pos_;
        Tok k;
        switch (c) {
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '/': k = Tok::Slash; break;
        case '^': k = Tok::Caret; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        default: fail_at(std::string("unexpected character '") + c + "'", start);
        }
        tok_ = {k, text_.substr(start, 1), start};
    }

    NodeId expression() {
        NodeId lhs = term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            const bool plus = tok_.kind == Tok::Plus;
            advance();
            const NodeId rhs = term();
            lhs = plus ? dag_.add(lhs, rhs) : dag_.sub(lhs, rhs);
        }
        return lhs;
    }

    NodeId term() {
        NodeId lhs = unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            const bool times = tok_.kind == Tok::Star;
            const std::size_t at = tok_.pos;
            advance();
            const NodeId rhs = unary();
            if (times) {
                lhs = dag_.mul(lhs, rhs);
            } else {
                if (dag_.is_zero(rhs)) fail_at("division by zero", at);
                lhs = dag_.div(lhs, rhs);
            }
        }
        return lhs;
    }

    NodeId unary() {
        if (tok_.kind == Tok::Minus) {
            advance();
            return dag_.neg(unary());
        }
        if (tok_.kind == Tok::Plus) {
            advance();
            return unary();
        }
        return power();
    }

    NodeId power() {
        const NodeId base = primary();
        if (tok_.kind != Tok::Caret) return base;
        const std::size_t at = tok_.pos;
        advance();
        const NodeId exponent = unary();
        if (!dag_.is_constant(exponent)) fail_at("exponent must be a numeric constant", at);
        return dag_.pow(base, dag_.constant_value(exponent));
    }

    NodeId primary() {
        const Token t = tok_;
        switch (t.kind) {
        case Tok::Number: {
            advance();
            try {
                return dag_.constant(parse_decimal(t.text));
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                fail_at(e.what(), t.pos);
            }
        }
        case Tok::Ident: {
            advance();
            if (tok_.kind == Tok::LParen) {
                NodeKind fn;
                if (t.text == "log" || t.text == "ln") fn = NodeKind::Log;
                else if (t.text == "exp") fn = NodeKind::Exp;
                else if (t.text == "sin") fn = NodeKind::Sin;
                else if (t.text == "cos") fn = NodeKind::Cos;
                else if (t.text == "tan") fn = NodeKind::Tan;
                else fail_at("unknown function '" + std::string(t.text) + "'", t.pos);
                advance();
                const NodeId arg = expression();
                expect_rparen();
                return dag_.unary(fn, arg);
            }
            auto it = symbols_.find(std::string(t.text));
            if (it == symbols_.end()) fail_at("undeclared symbol '" + std::string(t.text) + "'", t.pos);
            return it->second;
        }
        case Tok::LParen: {
            advance();
            const NodeId e = expression();
            expect_rparen();
            return e;
        }
        case Tok::End: fail("unexpected end of expression");
        default: fail("unexpected '" + std::string(t.text) + "'");
        }
    }

    void expect_rparen() {
        if (tok_.kind != Tok::RParen) fail("expected ')'");
        advance();
    }

    ExpressionDag& dag_;
    std::string_view text_;
    const SymbolTable& symbols_;
    int line_;
    int column_;
    std::size_t pos_ = 0;
    Token tok_{Tok::End, {}, 0};
};

} // namespace

NodeId parse_expression(ExpressionDag& dag, std::string_view text, const SymbolTable& symbols, int line,
                        int column) {
    return Parser(dag, text, symbols, line, column).parse();
}

} // namespace obsrank

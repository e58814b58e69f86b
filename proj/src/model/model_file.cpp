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
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "obsrank/model.hpp"

namespace obsrank {

namespace {

struct Line {
    int number;
    int column; // 1-based column of text[0] in the file
    std::string text;
};

const char* const kSections[] = {"model",    "states",   "parameters", "known_inputs", "unknown_inputs",
                                 "constants", "initial", "dynamics",   "outputs"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

Line trimmed(int number, int column, std::string_view text) {
    std::size_t b = 0;
    while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    std::size_t e = text.size();
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return {number, column + static_cast<int>(b), std::string(text.substr(b, e - b))};
}

class ModelReader {
public:
    ModelReader(std::string_view text, std::string id) { model_.id = std::move(id); split(text); }

    OdeModel read() {
        model_.dag = std::make_shared<ExpressionDag>();
        for (const auto& l : section("model")) model_.id = l.text;
        for (const auto& l : section("states")) names(l, [&](const std::string& n, int) { model_.states.push_back(n); });
        for (const auto& l : section("parameters"))
            names(l, [&](const std::string& n, int) { model_.parameters.push_back(n); });
        for (const auto& l : section("known_inputs"))
            names(l, [&](const std::string& n, int) { model_.known_inputs.push_back(n); });
        for (const auto& l : section("unknown_inputs")) unknown_inputs(l);
        for (const auto& l : section("constants")) constant(l);
        for (auto* list : {&model_.states, &model_.parameters, &model_.known_inputs}) {
            for (const auto& n : *list) declare(n, declared_line_.at(n));
        }
        for (const auto& w : model_.unknown_inputs) declare(w.name, declared_line_.at(w.name));
        for (const auto& l : section("initial")) initial(l);

        model_.dynamics.assign(model_.states.size(), model_.dag->zero());
        std::vector<bool> seen(model_.states.size(), false);
        for (const auto& l : section("dynamics")) dynamics(l, seen);
        for (std::size_t i = 0; i < seen.size(); ++i) {
            if (!seen[i]) throw ParseError("missing dynamics for state '" + model_.states[i] + "'", last_line_, 1);
        }
        for (const auto& l : section("outputs"))
            model_.outputs.push_back(parse_expression(*model_.dag, l.text, table_, l.number, l.column));
        if (model_.outputs.empty()) throw ParseError("at least one output is required", last_line_, 1);
        try {
            model_.validate();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), last_line_, 1);
        }
        return std::move(model_);
    }

private:
    void split(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string raw;
        int number = 0;
        std::string current;
        while (std::getline(in, raw)) {
            ++number;
            last_line_ = number;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            Line l = trimmed(number, 1, raw);
            if (l.text.empty()) continue;
            // "<section>:" header, possibly followed by inline content
            std::size_t k = 0;
            while (k < l.text.size() && is_ident_char(l.text[k])) ++k;
            std::size_t colon = k;
            while (colon < l.text.size() && l.text[colon] == ' ') ++colon;
            const std::string word = l.text.substr(0, k);
            bool header = false;
            if (colon < l.text.size() && l.text[colon] == ':') {
                for (const char* s : kSections) header = header || word == s;
                if (!header && l.text.rfind("d(", 0) != 0) {
                    throw ParseError("unknown section '" + word + "'", number, l.column);
                }
            }
            if (header) {
                current = word;
                if (!sections_[current].empty() || seen_sections_.count(current)) {
                    throw ParseError("section '" + word + "' appears twice", number, l.column);
                }
                seen_sections_.insert(current);
                Line rest = trimmed(number, l.column + static_cast<int>(colon) + 1, l.text.substr(colon + 1));
                if (!rest.text.empty()) sections_[current].push_back(rest);
                continue;
            }
            if (current.empty()) throw ParseError("content outside of any section", number, l.column);
            sections_[current].push_back(l);
        }
    }

    const std::vector<Line>& section(const std::string& name) { return sections_[name]; }

    template <class Fn>
    void names(const Line& l, Fn&& fn) {
        std::size_t i = 0;
        const std::string& t = l.text;
        while (i < t.size()) {
            while (i < t.size() && (t[i] == ',' || std::isspace(static_cast<unsigned char>(t[i])))) ++i;
            if (i == t.size()) break;
            if (!is_ident_start(t[i])) throw ParseError("expected a name", l.number, l.column + static_cast<int>(i));
            const std::size_t start = i;
            while (i < t.size() && is_ident_char(t[i])) ++i;
            const std::string n = t.substr(start, i - start);
            if (declared_line_.count(n)) {
                throw ParseError("name '" + n + "' is declared twice", l.number, l.column + static_cast<int>(start));
            }
            declared_line_.emplace(n, l.number);
            fn(n, static_cast<int>(i));
            // optional [k] suffix handled by the caller through `bracket_`
            bracket_.reset();
            if (i < t.size() && t[i] == '[') {
                const std::size_t close = t.find(']', i);
                if (close == std::string::npos)
                    throw ParseError("missing ']'", l.number, l.column + static_cast<int>(i));
                bracket_ = t.substr(i + 1, close - i - 1);
                bracket_column_ = l.column + static_cast<int>(i) + 1;
                i = close + 1;
            }
            if (on_bracket_) on_bracket_(l);
            else check_no_bracket(l);
        }
    }

    void unknown_inputs(const Line& l) {
        on_bracket_ = [&](const Line& line) {
            UnknownInput& w = model_.unknown_inputs.back();
            if (!bracket_) return;
            const std::string& b = *bracket_;
            if (b == "inf" || b == "infinite") {
                w.derivatives = std::nullopt;
                return;
            }
            if (b.empty() || !std::all_of(b.begin(), b.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                throw ParseError("derivative count must be a non-negative integer or 'inf'", line.number, bracket_column_);
            w.derivatives = std::stoi(b);
        };
        names(l, [&](const std::string& n, int) { model_.unknown_inputs.push_back({n, 0}); });
        on_bracket_ = nullptr;
    }

    void check_no_bracket(const Line& l) {
        if (bracket_) throw ParseError("unexpected '['", l.number, bracket_column_ - 1);
    }

    std::pair<std::string, Line> assignment(const Line& l) {
        const auto eq = l.text.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'name = value'", l.number, l.column);
        const Line lhs = trimmed(l.number, l.column, l.text.substr(0, eq));
        const Line rhs = trimmed(l.number, l.column + static_cast<int>(eq) + 1, l.text.substr(eq + 1));
        if (lhs.text.empty() || !is_ident_start(lhs.text[0]) ||
            !std::all_of(lhs.text.begin(), lhs.text.end(), is_ident_char))
            throw ParseError("expected a name before '='", l.number, l.column);
        return {lhs.text, rhs};
    }

    void constant(const Line& l) {
        auto [name, rhs] = assignment(l);
        if (declared_line_.count(name) || table_.count(name))
            throw ParseError("name '" + name + "' is declared twice", l.number, l.column);
        const NodeId v = parse_expression(*model_.dag, rhs.text, table_, rhs.number, rhs.column);
        if (!model_.dag->is_constant(v)) throw ParseError("constant must be numeric", rhs.number, rhs.column);
        table_.emplace(name, v);
    }

    void initial(const Line& l) {
        auto [name, rhs] = assignment(l);
        if (std::find(model_.states.begin(), model_.states.end(), name) == model_.states.end())
            throw ParseError("initial value for '" + name + "', which is not a state", l.number, l.column);
        const NodeId v = parse_expression(*model_.dag, rhs.text, table_, rhs.number, rhs.column);
        if (!model_.dag->is_constant(v)) throw ParseError("initial value must be numeric", rhs.number, rhs.column);
        model_.initial_hints[name] = model_.dag->constant_value(v);
    }

    void dynamics(const Line& l, std::vector<bool>& seen) {
        // d(name)/dt = expr
        const std::string& t = l.text;
        const auto bad = [&] { return ParseError("expected 'd(state)/dt = expression'", l.number, l.column); };
        if (t.rfind("d(", 0) != 0) throw bad();
        const auto close = t.find(')');
        if (close == std::string::npos) throw bad();
        const Line name = trimmed(l.number, l.column + 2, t.substr(2, close - 2));
        std::size_t i = close + 1;
        while (i < t.size() && t[i] == ' ') ++i;
        if (t.compare(i, 3, "/dt") != 0) throw bad();
        i += 3;
        while (i < t.size() && t[i] == ' ') ++i;
        if (i >= t.size() || t[i] != '=') throw bad();
        const auto it = std::find(model_.states.begin(), model_.states.end(), name.text);
        if (it == model_.states.end())
            throw ParseError("'" + name.text + "' is not a declared state", name.number, name.column);
        const auto idx = static_cast<std::size_t>(it - model_.states.begin());
        if (seen[idx]) throw ParseError("dynamics of '" + name.text + "' given twice", l.number, l.column);
        seen[idx] = true;
        const Line rhs = trimmed(l.number, l.column + static_cast<int>(i) + 1, t.substr(i + 1));
        model_.dynamics[idx] = parse_expression(*model_.dag, rhs.text, table_, rhs.number, rhs.column);
    }

    void declare(const std::string& name, int line) {
        if (table_.count(name)) throw ParseError("name '" + name + "' is declared twice", line, 1);
        table_.emplace(name, model_.dag->symbol(name));
    }

    OdeModel model_;
    std::map<std::string, std::vector<Line>> sections_;
    std::set<std::string> seen_sections_;
    std::map<std::string, int> declared_line_;
    SymbolTable table_;
    std::optional<std::string> bracket_;
    int bracket_column_ = 0;
    std::function<void(const Line&)> on_bracket_;
    int last_line_ = 1;
};

} // namespace

OdeModel parse_model(std::string_view text, const std::string& id) { return ModelReader(text, id).read(); }

OdeModel parse_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_model(buffer.str(), path.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(e.message(), e.line(), e.column(), path.string());
    }
}

} // namespace obsrank

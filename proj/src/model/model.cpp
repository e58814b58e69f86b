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
#include <cstdlib>
#include <set>

#include "obsrank/model.hpp"

namespace obsrank {

OdeModel OdeModel::clone() const {
    OdeModel copy = *this;
    copy.dag = std::make_shared<ExpressionDag>(*dag);
    copy.dag->set_interrupt({});
    copy.dag->set_node_limit(0);
    return copy;
}

void OdeModel::validate() const {
    if (!dag) throw Error(id + ": model has no expression DAG");
    if (dynamics.size() != states.size()) {
        throw Error(id + ": " + std::to_string(states.size()) + " states but " + std::to_string(dynamics.size()) +
                    " dynamics equations");
    }
    if (outputs.empty()) throw Error(id + ": the model needs at least one output");
    std::set<std::string> names;
    auto claim = [&](const std::string& n) {
        if (!names.insert(n).second) throw Error(id + ": name '" + n + "' is declared twice");
    };
    for (const auto& s : states) claim(s);
    for (const auto& p : parameters) claim(p);
    for (const auto& u : known_inputs) claim(u);
    for (const auto& w : unknown_inputs) {
        claim(w.name);
        if (w.derivatives && *w.derivatives < 0) throw Error(id + ": negative derivative count for " + w.name);
    }
    std::vector<NodeId> roots = dynamics;
    roots.insert(roots.end(), outputs.begin(), outputs.end());
    for (NodeId n : dag->reachable(roots)) {
        if (dag->node(n).kind != NodeKind::Symbol) continue;
        const std::string& name = dag->symbol_name(dag->symbol_of(n));
        if (!names.count(name)) throw Error(id + ": symbol '" + name + "' is not declared");
    }
    for (const auto& [name, value] : known_initial_states) {
        if (std::find(states.begin(), states.end(), name) == states.end())
            throw Error(id + ": known initial condition for unknown state '" + name + "'");
    }
}

const char* component_kind_name(ComponentKind kind) noexcept {
    switch (kind) {
    case ComponentKind::State: return "state";
    case ComponentKind::Parameter: return "parameter";
    case ComponentKind::InputJet: return "input";
    }
    return "?";
}

std::optional<std::size_t> AugmentedModel::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].name == name) return i;
    return std::nullopt;
}

std::string jet_name(const std::string& input, int level) {
    return level == 0 ? input : input + "_d" + std::to_string(level);
}

AugmentedModel lift(const OdeModel& m) {
    m.validate();
    AugmentedModel a;
    a.id = m.id;
    a.dag = m.dag;
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        Component c{m.states[i], ComponentKind::State, m.states[i], 0, a.dag->declare(m.states[i]), std::nullopt};
        if (auto it = m.known_initial_states.find(m.states[i]); it != m.known_initial_states.end())
            c.known_value = it->second;
        a.components.push_back(std::move(c));
        a.dynamics.push_back(m.dynamics[i]);
    }
    a.outputs = m.outputs;
    for (const auto& u : m.known_inputs) a.known_inputs.push_back({u, a.dag->declare(u)});
    a.pending_parameters = m.parameters;
    a.pending_unknown_inputs = m.unknown_inputs;
    return a;
}

AugmentedModel augment_with_parameters(AugmentedModel m) {
    auto first_jet = std::find_if(m.components.begin(), m.components.end(),
                                  [](const Component& c) { return c.kind == ComponentKind::InputJet; });
    const auto at = static_cast<std::size_t>(first_jet - m.components.begin());
    std::vector<Component> params;
    for (const auto& p : m.pending_parameters)
        params.push_back({p, ComponentKind::Parameter, p, 0, m.dag->declare(p), std::nullopt});
    m.components.insert(m.components.begin() + static_cast<std::ptrdiff_t>(at), params.begin(), params.end());
    m.dynamics.insert(m.dynamics.begin() + static_cast<std::ptrdiff_t>(at), params.size(), m.dag->zero());
    m.pending_parameters.clear();
    return m;
}

AugmentedModel augment_with_parameters(const OdeModel& m) { return augment_with_parameters(lift(m)); }

AugmentedModel augment_with_unknown_inputs(AugmentedModel m, const DerivativeCaps& caps) {
    for (const auto& [name, cap] : caps) {
        const bool known = std::any_of(m.pending_unknown_inputs.begin(), m.pending_unknown_inputs.end(),
                                       [&](const UnknownInput& w) { return w.name == name; });
        if (!known) throw Error("derivative cap given for '" + name + "', which is not an unknown input");
    }
    for (const auto& w : m.pending_unknown_inputs) {
        std::optional<int> cap = w.derivatives;
        if (auto it = caps.find(w.name); it != caps.end()) cap = it->second;
        if (!cap) {
            m.warnings.push_back("infinitely many nonzero derivatives requested for '" + w.name + "'; using " +
                                 std::to_string(kDefaultInfiniteCap) + " (increase it if needed)");
            cap = kDefaultInfiniteCap;
        }
        if (*cap < 0) throw Error("negative derivative count for '" + w.name + "'");
        for (int level = 0; level <= *cap; ++level) {
            const std::string name = jet_name(w.name, level);
            m.components.push_back({name, ComponentKind::InputJet, w.name, level, m.dag->declare(name), std::nullopt});
        }
        for (int level = 0; level <= *cap; ++level) {
            m.dynamics.push_back(level < *cap ? m.dag->symbol(jet_name(w.name, level + 1)) : m.dag->zero());
        }
    }
    m.pending_unknown_inputs.clear();
    return m;
}

AugmentedModel augment_with_unknown_inputs(const OdeModel& m, const DerivativeCaps& caps) {
    return augment_with_unknown_inputs(augment_with_parameters(lift(m)), caps);
}

OdeModel fix_variables(const OdeModel& m, const std::map<std::string, Rational>& bindings) {
    OdeModel out = m;
    std::unordered_map<SymbolId, NodeId> subst;
    for (const auto& [name, value] : bindings) {
        if (auto it = std::find(out.parameters.begin(), out.parameters.end(), name); it != out.parameters.end()) {
            out.parameters.erase(it);
            subst.emplace(out.dag->declare(name), out.dag->constant(value));
        } else if (std::find(out.states.begin(), out.states.end(), name) != out.states.end()) {
            out.known_initial_states[name] = value;
        } else {
            throw Error(m.id + ": cannot fix '" + name + "': not a parameter or state of the model");
        }
    }
    for (auto& f : out.dynamics) f = out.dag->substitute(f, subst);
    for (auto& g : out.outputs) g = out.dag->substitute(g, subst);
    out.validate();
    return out;
}

std::filesystem::path models_directory() {
    if (const char* env = std::getenv("OBSRANK_MODELS_DIR"); env != nullptr && *env != '\0') return env;
    return OBSRANK_MODELS_DIR;
}

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

OdeModel builtin_model(const std::string& name, const std::string& variant) {
    const auto dir = models_directory() / lowercase(name);
    const auto file = dir / (variant + ".model");
    if (!std::filesystem::is_directory(dir)) throw Error("unknown corpus model '" + name + "'");
    if (!std::filesystem::is_regular_file(file)) {
        throw Error("corpus model '" + name + "' has no variant '" + variant + "'");
    }
    OdeModel m = parse_model_file(file);
    m.id = lowercase(name) + "/" + variant;
    return m;
}

std::vector<std::pair<std::string, std::string>> corpus_entries() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& dir : std::filesystem::directory_iterator(models_directory())) {
        if (!dir.is_directory()) continue;
        for (const auto& f : std::filesystem::directory_iterator(dir.path())) {
            if (f.path().extension() == ".model")
                out.emplace_back(dir.path().filename().string(), f.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace obsrank

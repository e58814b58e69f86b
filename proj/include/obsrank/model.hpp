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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "obsrank/expr.hpp"

namespace obsrank {

struct UnknownInput {
    std::string name;
    /// Number of nonzero time derivatives assumed by default; nullopt means
    /// "infinitely many" and is lowered by the augmentation step.
    std::optional<int> derivatives = 0;
};

/// dx/dt = f(x, theta, u, w), y = g(x, theta, u, w).
///
/// All formulas live in one shared DAG. Transformations append nodes to it
/// and never modify existing ones, so copies of a model stay valid; use
/// clone() before handing a model to another thread.
struct OdeModel {
    std::string id;
    std::shared_ptr<ExpressionDag> dag;
    std::vector<std::string> states;
    std::vector<std::string> parameters;
    std::vector<std::string> known_inputs;
    std::vector<UnknownInput> unknown_inputs;
    std::vector<NodeId> dynamics;
    std::vector<NodeId> outputs;
    /// Optional nominal values, used as Taylor expansion centers.
    std::map<std::string, Rational> initial_hints;
    /// States whose initial condition was declared known by fix_variables.
    std::map<std::string, Rational> known_initial_states;

    OdeModel clone() const;
    /// Throws Error when an invariant is violated.
    void validate() const;

    std::size_t n_states() const noexcept { return states.size(); }
    std::size_t n_parameters() const noexcept { return parameters.size(); }
    std::size_t n_known_inputs() const noexcept { return known_inputs.size(); }
    std::size_t n_unknown_inputs() const noexcept { return unknown_inputs.size(); }
    std::size_t n_outputs() const noexcept { return outputs.size(); }
};

enum class ComponentKind { State, Parameter, InputJet };

const char* component_kind_name(ComponentKind kind) noexcept;

/// One entry of the augmented state vector.
struct Component {
    std::string name;
    ComponentKind kind;
    /// Unknown-input name for jets; the component name otherwise.
    std::string base;
    /// Derivative level for jets, 0 otherwise.
    int level = 0;
    SymbolId symbol;
    /// Set for states with a known initial condition; such columns are not
    /// part of the rank test.
    std::optional<Rational> known_value;

    bool operator==(const Component&) const = default;
};

struct KnownInput {
    std::string name;
    SymbolId symbol;
    bool operator==(const KnownInput&) const = default;
};

/// The model rewritten as an autonomous-in-the-unknowns system: parameters
/// and unknown-input jets become states. Component order is always states,
/// parameters, then input jets in declaration order.
struct AugmentedModel {
    std::string id;
    std::shared_ptr<ExpressionDag> dag;
    std::vector<Component> components;
    /// One entry per component.
    std::vector<NodeId> dynamics;
    std::vector<NodeId> outputs;
    std::vector<KnownInput> known_inputs;
    /// Not yet moved into the state vector.
    std::vector<std::string> pending_parameters;
    std::vector<UnknownInput> pending_unknown_inputs;
    std::vector<std::string> warnings;

    std::size_t dimension() const noexcept { return components.size(); }
    std::size_t n_outputs() const noexcept { return outputs.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;
};

/// Default cap used when infinitely many nonzero input derivatives are requested.
inline constexpr int kDefaultInfiniteCap = 3;

/// Per-input derivative caps; inputs not listed keep the model's default.
using DerivativeCaps = std::map<std::string, std::optional<int>>;

/// States only; parameters and unknown inputs pending.
AugmentedModel lift(const OdeModel& m);

AugmentedModel augment_with_parameters(AugmentedModel m);
AugmentedModel augment_with_parameters(const OdeModel& m);

/// Adds w, w', ..., w^(cap) for every pending unknown input. The top level
/// gets zero dynamics. An infinite cap is lowered to kDefaultInfiniteCap
/// with a warning.
AugmentedModel augment_with_unknown_inputs(AugmentedModel m, const DerivativeCaps& caps = {});
/// Parameters and unknown inputs both moved into the state vector.
AugmentedModel augment_with_unknown_inputs(const OdeModel& m, const DerivativeCaps& caps = {});

/// Name of the level-k jet symbol of an input (level 0 is the input itself).
std::string jet_name(const std::string& input, int level);

/// Replaces parameters by numeric values (removing them from the parameter
/// list) or marks states as having a known initial condition.
OdeModel fix_variables(const OdeModel& m, const std::map<std::string, Rational>& bindings);

/// Parses the line-oriented model language.
OdeModel parse_model(std::string_view text, const std::string& id = "model");
OdeModel parse_model_file(const std::filesystem::path& path);

/// Directory holding the shipped corpus; OBSRANK_MODELS_DIR overrides the
/// build-time default.
std::filesystem::path models_directory();

/// Loads models/<name>/<variant>.model (name matched case-insensitively).
OdeModel builtin_model(const std::string& name, const std::string& variant = "default");

/// (name, variant) pairs of every corpus file.
std::vector<std::pair<std::string, std::string>> corpus_entries();

} // namespace obsrank

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

#include <optional>
#include <vector>

#include "obsrank/field.hpp"
#include "obsrank/matrix.hpp"
#include "obsrank/model.hpp"
#include "obsrank/probobs.hpp"
#include "obsrank/report.hpp"

namespace obsrank {

/// Extended Lie derivatives along the augmented dynamics, with known-input
/// derivatives u, u^(1), ... as extra symbols.
class LieContext {
public:
    /// Known-input derivatives above `known_input_cap` are zero.
    explicit LieContext(const AugmentedModel& m, std::optional<int> known_input_cap = std::nullopt);

    const AugmentedModel& model() const noexcept { return model_; }
    /// Symbol of the level-th derivative of known input q; declared on demand.
    SymbolId input_jet(std::size_t q, std::size_t level);
    /// Jet symbols declared so far for input q (level 0 included).
    const std::vector<SymbolId>& input_jets(std::size_t q) const { return jets_.at(q); }

    /// (d prev/d x) f + sum_j (d prev/d u^(j)) u^(j+1).
    NodeId lie_derivative(NodeId prev);
    /// Partial derivatives of e with respect to every component.
    std::vector<NodeId> gradient(NodeId e);

private:
    AugmentedModel model_;
    std::optional<int> cap_;
    std::vector<std::vector<SymbolId>> jets_;
};

/// One-shot form of LieContext::lie_derivative.
NodeId extended_lie_derivative(const AugmentedModel& m, NodeId prev, std::optional<int> known_input_cap = std::nullopt);

struct SymbolicObservabilityMatrix {
    std::vector<std::string> columns;
    /// lie[k][r] = L^k g_r.
    std::vector<std::vector<NodeId>> lie;
    /// blocks[k][r * n + c] = d(L^k g_r)/d x_c.
    std::vector<std::vector<NodeId>> blocks;

    std::size_t orders() const noexcept { return blocks.size(); }
};

/// Appends the next block (order orders()).
void append_block(SymbolicObservabilityMatrix& om, LieContext& ctx);

/// Blocks 0..count-1.
SymbolicObservabilityMatrix observability_matrix(LieContext& ctx, std::size_t count);

/// Evaluates the symbolic matrix at the point of a probobs specialization:
/// components at x0 and u^(j) = j-th derivative of the input series at 0.
/// Rows are ordered k * n_y + r like assemble_jacobian.
FieldMatrix specialize_matrix(const SymbolicObservabilityMatrix& om, LieContext& ctx, const SpecializedSystem& spec);

AnalysisReport fispo_test(const OdeModel& m, const AnalysisOptions& options);

} // namespace obsrank

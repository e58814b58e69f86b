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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "obsrank/field.hpp"
#include "obsrank/matrix.hpp"
#include "obsrank/model.hpp"
#include "obsrank/report.hpp"
#include "obsrank/series.hpp"

namespace obsrank {

/// Symbolic pieces of the variational system, derived once per model.
struct VariationalSystem {
    AugmentedModel model;
    /// symbol id -> component index (>= 0), known input -(k+1), or unused 0x7fffffff.
    std::vector<std::int32_t> symbol_slot;
    /// jacobian[i * n + c] = d f_i / d x_c.
    std::vector<NodeId> jacobian;
    /// output_gradient[r * n + c] = d g_r / d x_c.
    std::vector<NodeId> output_gradient;

    std::size_t dimension() const noexcept { return model.dimension(); }
};

/// Differentiates the dynamics and outputs. Grows the model's DAG.
std::shared_ptr<const VariationalSystem> build_variational_system(const AugmentedModel& m);

struct SpecializedSystem {
    std::shared_ptr<const VariationalSystem> system;
    PrimeField field{kDefaultPrime};
    std::uint64_t seed = 0;
    /// Series truncation order of the inputs.
    std::size_t order = 0;
    /// Initial values of the augmented state; parameters included.
    std::vector<std::uint64_t> x0;
    /// One series per known input.
    std::vector<TruncatedSeries> inputs;
    /// Residue of every constant node present at specialization, indexed by NodeId.
    std::vector<std::uint64_t> constants;
    /// Resamplings needed before every denominator was a unit.
    std::size_t retries = 0;
    /// Polled during long loops; may throw.
    std::function<void()> interrupt;

    /// Value of the j-th time derivative of a known input at t = 0.
    std::uint64_t input_derivative(std::size_t input, std::size_t j) const;
};

struct SpecializeOptions {
    std::uint64_t sample_bound = kDefaultSampleBound;
    int retries = 3;
    /// Input series coefficients above this degree are zero.
    std::optional<int> known_input_derivs;
};

/// Deterministic in (model, seed, prime, order, options). Throws
/// RetryExhaustedError when every attempt hits a vanishing denominator.
SpecializedSystem specialize(const AugmentedModel& m, std::uint64_t seed, std::uint64_t prime, std::size_t order,
                             const SpecializeOptions& options = {});
SpecializedSystem specialize(std::shared_ptr<const VariationalSystem> system, std::uint64_t seed, std::uint64_t prime,
                             std::size_t order, const SpecializeOptions& options = {});

struct VariationalSolution {
    /// Phi[i]: trajectory of component i.
    std::vector<TruncatedSeries> phi;
    /// gamma[i * n + k] = d Phi_i / d x0_k.
    std::vector<TruncatedSeries> gamma;
    /// Coefficients valid modulo t^order.
    std::size_t order = 0;

    bool operator==(const VariationalSolution&) const = default;
};

enum class SolverMethod { Newton, Naive };

/// Called after every step with the solution valid modulo t^(valid order).
using StepObserver = std::function<void(const VariationalSolution&)>;

VariationalSolution solve_variational(const SpecializedSystem& spec, std::size_t order,
                                      SolverMethod method = SolverMethod::Newton, const StepObserver& observer = {});

/// Rows j * n_y + r hold coefficient j of the output gradient series, times j!
/// unless scale_factorial is false. One column per augmented component.
FieldMatrix assemble_jacobian(const VariationalSolution& sol, const SpecializedSystem& spec, bool scale_factorial = true);

/// Residuals of P_i = den_i * Phi_i' - num_i and of its variation along Gamma,
/// valid modulo t^(sol.order - 1); all zero for a correct solution.
std::vector<TruncatedSeries> variational_residual(const SpecializedSystem& spec, const VariationalSolution& sol);

AnalysisReport prob_obs_test(const OdeModel& m, const AnalysisOptions& options);

} // namespace obsrank

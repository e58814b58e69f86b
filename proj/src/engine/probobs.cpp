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

#include "obsrank/probobs.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "obsrank/errors.hpp"
#include "obsrank/pipeline.hpp"
#include "obsrank/rings.hpp"

namespace obsrank {

namespace {

constexpr std::int32_t kUnused = 0x7fffffff;

using Span = std::span<std::uint64_t>;
using CSpan = std::span<const std::uint64_t>;

/// n series of stride N stored back to back.
struct SeriesBlock {
    std::size_t count = 0;
    std::size_t stride = 0;
    std::vector<std::uint64_t> data;

    SeriesBlock(std::size_t c, std::size_t s) : count(c), stride(s), data(c * s, 0) {}
    Span at(std::size_t i, std::size_t len) { return {data.data() + i * stride, len}; }
    CSpan at(std::size_t i, std::size_t len) const { return {data.data() + i * stride, len}; }
};

SeriesBlock identity(std::size_t n, std::size_t stride) {
    SeriesBlock b(n * n, stride);
    for (std::size_t i = 0; i < n; ++i) b.data[(i * n + i) * stride] = 1;
    return b;
}

/// C = A * B for n x n matrices of series, modulo t^len. A may be n x n or
/// n x 1 via b_cols.
void matmul(const PrimeField& f, const SeriesBlock& a, std::size_t rows, std::size_t inner, const SeriesBlock& b,
            std::size_t cols, std::size_t len, SeriesBlock& c, const std::function<void()>& interrupt) {
    std::fill(c.data.begin(), c.data.end(), 0);
    for (std::size_t i = 0; i < rows; ++i) {
        if (interrupt) interrupt();
        for (std::size_t k = 0; k < inner; ++k) {
            const CSpan aik = a.at(i * inner + k, len);
            if (kernel::effective_length(aik) == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) kernel::mul_add_trunc(f, aik, b.at(k * cols + j, len), c.at(i * cols + j, len));
        }
    }
}

void derivative_into(const PrimeField& f, CSpan a, Span out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k + 1 < a.size() ? f.mul(a[k + 1], (k + 1) % f.modulus()) : 0;
}

struct ConstantSeriesRing : SeriesRing {
    const ExpressionDag* dag;
    const std::vector<std::uint64_t>* residues;
    Value constant(NodeId id) const {
        if (id >= residues->size()) return from_rational(dag->constant_value(id));
        return TruncatedSeries::constant(field.modulus(), order, (*residues)[id]);
    }
};

class SeriesEvaluator {
public:
    explicit SeriesEvaluator(const SpecializedSystem& spec) : spec_(spec) {}

    /// Evaluates roots with components taken from phi, modulo t^len.
    std::vector<TruncatedSeries> operator()(std::span<const NodeId> roots, const SeriesBlock& phi, std::size_t len) const {
        const VariationalSystem& sys = *spec_.system;
        const ConstantSeriesRing ring{{spec_.field, len}, sys.model.dag.get(), &spec_.constants};
        return evaluate(*sys.model.dag, roots, ring, [&](SymbolId s) {
            const std::int32_t slot = s < sys.symbol_slot.size() ? sys.symbol_slot[s] : kUnused;
            if (slot == kUnused) throw Error("symbol '" + sys.model.dag->symbol_name(s) + "' has no value");
            if (slot >= 0) {
                const CSpan src = phi.at(static_cast<std::size_t>(slot), len);
                return TruncatedSeries(spec_.field.modulus(), std::vector<std::uint64_t>(src.begin(), src.end()));
            }
            return spec_.inputs[static_cast<std::size_t>(-slot - 1)].truncated(len);
        });
    }

private:
    const SpecializedSystem& spec_;
};

/// Dense n x n block of the Jacobian entries evaluated at phi.
SeriesBlock jacobian_at(const SpecializedSystem& spec, const SeriesEvaluator& eval, const SeriesBlock& phi,
                        std::size_t len, std::size_t stride) {
    const VariationalSystem& sys = *spec.system;
    const std::size_t n = sys.dimension();
    std::vector<NodeId> roots;
    std::vector<std::size_t> where;
    for (std::size_t e = 0; e < sys.jacobian.size(); ++e) {
        if (sys.model.dag->is_zero(sys.jacobian[e])) continue;
        roots.push_back(sys.jacobian[e]);
        where.push_back(e);
    }
    SeriesBlock j(n * n, stride);
    const auto values = eval(roots, phi, len);
    for (std::size_t r = 0; r < roots.size(); ++r) std::copy(values[r].coeffs().begin(), values[r].coeffs().end(), j.at(where[r], len).begin());
    return j;
}

VariationalSolution to_solution(const SpecializedSystem& spec, const SeriesBlock& phi, const SeriesBlock& gamma,
                                std::size_t order, std::size_t valid) {
    VariationalSolution sol;
    sol.order = valid;
    const std::uint64_t p = spec.field.modulus();
    for (std::size_t i = 0; i < phi.count; ++i) {
        std::vector<std::uint64_t> c(order, 0);
        std::copy_n(phi.data.begin() + static_cast<std::ptrdiff_t>(i * phi.stride), valid, c.begin());
        sol.phi.emplace_back(p, std::move(c));
    }
    for (std::size_t i = 0; i < gamma.count; ++i) {
        std::vector<std::uint64_t> c(order, 0);
        std::copy_n(gamma.data.begin() + static_cast<std::ptrdiff_t>(i * gamma.stride), valid, c.begin());
        sol.gamma.emplace_back(p, std::move(c));
    }
    return sol;
}

VariationalSolution solve_newton(const SpecializedSystem& spec, std::size_t order, const StepObserver& observer) {
    const PrimeField& f = spec.field;
    const VariationalSystem& sys = *spec.system;
    const std::size_t n = sys.dimension();
    const std::size_t N = order;
    const SeriesEvaluator eval(spec);
    const auto& interrupt = spec.interrupt;

    SeriesBlock phi(n, N);
    for (std::size_t i = 0; i < n; ++i) phi.data[i * N] = spec.x0[i];
    SeriesBlock y = identity(n, N);
    SeriesBlock z = identity(n, N);
    SeriesBlock tmp_vec(n, N), s_vec(n, N), w_vec(n, N), d_vec(n, N);
    SeriesBlock r_mat(n * n, N), s_mat(n * n, N), w_mat(n * n, N), jy(n * n, N);

    std::size_t m = 1;
    if (observer) observer(to_solution(spec, phi, y, N, m));
    while (m < N) {
        const std::size_t m2 = std::min(2 * m, N);
        const std::size_t lr = m2 - 1;

        // Phi <- Phi + Y * int(Z * (f(Phi) - Phi')).
        const auto fv = eval(sys.model.dynamics, phi, m2);
        for (std::size_t i = 0; i < n; ++i) {
            Span r = tmp_vec.at(i, lr);
            derivative_into(f, phi.at(i, m2), r);
            const CSpan fi = fv[i].coeffs();
            for (std::size_t k = 0; k < lr; ++k) r[k] = f.sub(fi[k], r[k]);
        }
        matmul(f, z, n, n, tmp_vec, 1, lr, s_vec, interrupt);
        for (std::size_t i = 0; i < n; ++i) kernel::integrate(f, s_vec.at(i, lr), w_vec.at(i, m2));
        matmul(f, y, n, n, w_vec, 1, m2, d_vec, interrupt);
        for (std::size_t i = 0; i < n * N; ++i) phi.data[i] = f.add(phi.data[i], d_vec.data[i]);

        // Y <- Y - Y * int(Z * (Y' - J(Phi) Y)).
        const SeriesBlock jac = jacobian_at(spec, eval, phi, m2, N);
        matmul(f, jac, n, n, y, n, lr, jy, interrupt);
        for (std::size_t e = 0; e < n * n; ++e) {
            Span r = r_mat.at(e, lr);
            derivative_into(f, y.at(e, m2), r);
            const CSpan je = jy.at(e, lr);
            for (std::size_t k = 0; k < lr; ++k) r[k] = f.sub(r[k], je[k]);
        }
        matmul(f, z, n, n, r_mat, n, lr, s_mat, interrupt);
        std::fill(w_mat.data.begin(), w_mat.data.end(), 0);
        for (std::size_t e = 0; e < n * n; ++e) kernel::integrate(f, s_mat.at(e, lr), w_mat.at(e, m2));
        matmul(f, y, n, n, w_mat, n, m2, s_mat, interrupt);
        for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] = f.sub(y.data[i], s_mat.data[i]);

        // Z <- Z + Z * (I - Y Z).
        if (m2 < N) {
            matmul(f, y, n, n, z, n, m2, r_mat, interrupt);
            for (std::size_t i = 0; i < r_mat.data.size(); ++i) r_mat.data[i] = f.neg(r_mat.data[i]);
            for (std::size_t i = 0; i < n; ++i) {
                auto& d = r_mat.data[(i * n + i) * N];
                d = f.add(d, 1);
            }
            matmul(f, z, n, n, r_mat, n, m2, s_mat, interrupt);
            for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] = f.add(z.data[i], s_mat.data[i]);
        }
        m = m2;
        if (observer) observer(to_solution(spec, phi, y, N, m));
    }
    return to_solution(spec, phi, y, N, N);
}

VariationalSolution solve_naive(const SpecializedSystem& spec, std::size_t order, const StepObserver& observer) {
    const PrimeField& f = spec.field;
    const VariationalSystem& sys = *spec.system;
    const std::size_t n = sys.dimension();
    const std::size_t N = order;
    const SeriesEvaluator eval(spec);

    SeriesBlock phi(n, N);
    for (std::size_t i = 0; i < n; ++i) phi.data[i * N] = spec.x0[i];
    SeriesBlock gamma = identity(n, N);
    SeriesBlock jg(n * n, N);
    if (observer) observer(to_solution(spec, phi, gamma, N, 1));
    for (std::size_t k = 1; k < N; ++k) {
        const auto fv = eval(sys.model.dynamics, phi, k);
        const SeriesBlock jac = jacobian_at(spec, eval, phi, k, N);
        matmul(f, jac, n, n, gamma, n, k, jg, spec.interrupt);
        SeriesBlock next_phi(n, N);
        for (std::size_t i = 0; i < n; ++i) {
            kernel::integrate(f, fv[i].coeffs(), next_phi.at(i, k + 1));
            next_phi.data[i * N] = spec.x0[i];
        }
        SeriesBlock next_gamma = identity(n, N);
        for (std::size_t e = 0; e < n * n; ++e) {
            std::vector<std::uint64_t> w(k + 1);
            kernel::integrate(f, jg.at(e, k), w);
            Span g = next_gamma.at(e, k + 1);
            for (std::size_t t = 1; t <= k; ++t) g[t] = w[t];
        }
        phi = std::move(next_phi);
        gamma = std::move(next_gamma);
        if (observer) observer(to_solution(spec, phi, gamma, N, k + 1));
    }
    return to_solution(spec, phi, gamma, N, N);
}

} // namespace

std::shared_ptr<const VariationalSystem> build_variational_system(const AugmentedModel& m) {
    auto sys = std::make_shared<VariationalSystem>();
    sys->model = m;
    ExpressionDag& dag = *m.dag;
    const std::size_t n = m.dimension();
    sys->symbol_slot.assign(dag.symbol_count(), kUnused);
    for (std::size_t c = 0; c < n; ++c) sys->symbol_slot[m.components[c].symbol] = static_cast<std::int32_t>(c);
    for (std::size_t k = 0; k < m.known_inputs.size(); ++k)
        sys->symbol_slot[m.known_inputs[k].symbol] = -static_cast<std::int32_t>(k) - 1;
    sys->jacobian.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n; ++c) sys->jacobian[i * n + c] = dag.differentiate(m.dynamics[i], m.components[c].symbol);
    sys->output_gradient.resize(m.n_outputs() * n);
    for (std::size_t r = 0; r < m.n_outputs(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            sys->output_gradient[r * n + c] = dag.differentiate(m.outputs[r], m.components[c].symbol);
    return sys;
}

std::uint64_t SpecializedSystem::input_derivative(std::size_t input, std::size_t j) const {
    if (j >= order) return 0;
    std::uint64_t fact = 1;
    for (std::size_t i = 2; i <= j; ++i) fact = field.mul(fact, i % field.modulus());
    return field.mul(fact, inputs.at(input)[j]);
}

SpecializedSystem specialize(const AugmentedModel& m, std::uint64_t seed, std::uint64_t prime, std::size_t order,
                             const SpecializeOptions& options) {
    return specialize(build_variational_system(m), seed, prime, order, options);
}

SpecializedSystem specialize(std::shared_ptr<const VariationalSystem> system, std::uint64_t seed, std::uint64_t prime,
                             std::size_t order, const SpecializeOptions& options) {
    if (order == 0 || order >= prime) throw Error("truncation order must be positive and below the prime");
    if (options.sample_bound < 1 || options.sample_bound >= prime) throw Error("sample bound must lie in [1, p)");
    SpecializedSystem spec;
    spec.system = system;
    spec.field = PrimeField(prime);
    spec.seed = seed;
    spec.order = order;
    const AugmentedModel& m = system->model;
    const PrimeField& f = spec.field;

    std::vector<NodeId> roots = m.dynamics;
    roots.insert(roots.end(), m.outputs.begin(), m.outputs.end());
    roots.insert(roots.end(), system->jacobian.begin(), system->jacobian.end());
    roots.insert(roots.end(), system->output_gradient.begin(), system->output_gradient.end());
    spec.constants.assign(m.dag->size(), 0);
    for (std::size_t id = 0; id < spec.constants.size(); ++id) {
        const auto node = static_cast<NodeId>(id);
        if (m.dag->node(node).kind == NodeKind::Constant) spec.constants[id] = to_field(f, m.dag->constant_value(node));
    }

    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        auto sample = [&] { return 1 + rng() % options.sample_bound; };
        spec.x0.assign(m.dimension(), 0);
        for (std::size_t c = 0; c < m.dimension(); ++c) {
            const auto& known = m.components[c].known_value;
            spec.x0[c] = known ? to_field(f, *known) : sample();
        }
        spec.inputs.clear();
        for (std::size_t q = 0; q < m.known_inputs.size(); ++q) {
            std::vector<std::uint64_t> c(order, 0);
            for (std::size_t j = 0; j < order; ++j) {
                const bool live = !options.known_input_derivs || j <= static_cast<std::size_t>(*options.known_input_derivs);
                if (live) c[j] = sample();
            }
            spec.inputs.emplace_back(prime, std::move(c));
        }
        try {
            evaluate(*m.dag, std::span<const NodeId>(roots), FieldRing{f}, [&](SymbolId s) -> std::uint64_t {
                const std::int32_t slot = s < system->symbol_slot.size() ? system->symbol_slot[s] : kUnused;
                if (slot == kUnused) throw Error("symbol '" + m.dag->symbol_name(s) + "' has no value");
                if (slot >= 0) return spec.x0[static_cast<std::size_t>(slot)];
                return spec.inputs[static_cast<std::size_t>(-slot - 1)][0];
            });
        } catch (const ZeroDivisorError&) {
            continue;
        }
        spec.retries = static_cast<std::size_t>(attempt);
        return spec;
    }
    throw RetryExhaustedError("unlucky specialization: a denominator vanished in all " +
                              std::to_string(options.retries + 1) + " attempts; try another seed");
}

VariationalSolution solve_variational(const SpecializedSystem& spec, std::size_t order, SolverMethod method,
                                      const StepObserver& observer) {
    if (order == 0) throw Error("solver order must be positive");
    if (order > spec.order) throw Error("solver order exceeds the input series order");
    if (order >= spec.field.modulus()) throw Error("solver order must be below the prime");
    return method == SolverMethod::Newton ? solve_newton(spec, order, observer) : solve_naive(spec, order, observer);
}

FieldMatrix assemble_jacobian(const VariationalSolution& sol, const SpecializedSystem& spec, bool scale_factorial) {
    const VariationalSystem& sys = *spec.system;
    const PrimeField& f = spec.field;
    const std::size_t n = sys.dimension();
    const std::size_t ny = sys.model.n_outputs();
    const std::size_t N = sol.order;

    SeriesBlock phi(n, N);
    for (std::size_t i = 0; i < n; ++i) std::copy_n(sol.phi[i].coeffs().begin(), N, phi.at(i, N).begin());
    SeriesBlock gamma(n * n, N);
    for (std::size_t e = 0; e < n * n; ++e) std::copy_n(sol.gamma[e].coeffs().begin(), N, gamma.at(e, N).begin());

    const SeriesEvaluator eval(spec);
    const auto g = eval(sys.output_gradient, phi, N);
    SeriesBlock grad(ny * n, N);
    for (std::size_t e = 0; e < g.size(); ++e) std::copy(g[e].coeffs().begin(), g[e].coeffs().end(), grad.at(e, N).begin());
    SeriesBlock dy(ny * n, N);
    matmul(f, grad, ny, n, gamma, n, N, dy, spec.interrupt);

    FieldMatrix out(f.modulus(), N * ny, n);
    std::uint64_t fact = 1;
    for (std::size_t j = 0; j < N; ++j) {
        if (j > 0 && scale_factorial) fact = f.mul(fact, j % f.modulus());
        for (std::size_t r = 0; r < ny; ++r)
            for (std::size_t k = 0; k < n; ++k) out(j * ny + r, k) = f.mul(fact, dy.data[(r * n + k) * N + j]);
    }
    return out;
}

std::vector<TruncatedSeries> variational_residual(const SpecializedSystem& spec, const VariationalSolution& sol) {
    const VariationalSystem& sys = *spec.system;
    const AugmentedModel& m = sys.model;
    ExpressionDag& dag = *m.dag;
    const std::size_t n = sys.dimension();
    const std::size_t N = sol.order;
    if (N < 2) return {};
    const std::size_t L = N - 1;

    // Rational forms and their gradients, independent of the solver's DAG path.
    std::vector<NodeId> roots;
    for (std::size_t i = 0; i < n; ++i) {
        const RationalForm rf = rational_normal_form(dag, m.dynamics[i]);
        roots.push_back(rf.numerator);
        roots.push_back(rf.denominator);
        for (std::size_t c = 0; c < n; ++c) {
            roots.push_back(dag.differentiate(rf.numerator, m.components[c].symbol));
            roots.push_back(dag.differentiate(rf.denominator, m.components[c].symbol));
        }
    }
    SeriesBlock phi(n, N);
    for (std::size_t i = 0; i < n; ++i) std::copy_n(sol.phi[i].coeffs().begin(), N, phi.at(i, N).begin());
    const SeriesEvaluator eval(spec);
    const auto v = eval(roots, phi, L);
    const std::size_t stride = 2 + 2 * n;
    std::vector<TruncatedSeries> out;
    for (std::size_t i = 0; i < n; ++i) {
        const TruncatedSeries& num = v[i * stride];
        const TruncatedSeries& den = v[i * stride + 1];
        const TruncatedSeries dphi = series_derivative(sol.phi[i]).truncated(L);
        out.push_back(den * dphi - num);
        std::vector<std::pair<std::size_t, TruncatedSeries>> coefs;
        for (std::size_t c = 0; c < n; ++c) {
            TruncatedSeries coef = v[i * stride + 3 + 2 * c] * dphi - v[i * stride + 2 + 2 * c];
            if (!coef.is_zero()) coefs.emplace_back(c, std::move(coef));
        }
        for (std::size_t k = 0; k < n; ++k) {
            TruncatedSeries acc = den * series_derivative(sol.gamma[i * n + k]).truncated(L);
            for (const auto& [c, coef] : coefs) acc = acc + coef * sol.gamma[c * n + k].truncated(L);
            out.push_back(acc);
        }
    }
    return out;
}

AnalysisReport prob_obs_test(const OdeModel& m, const AnalysisOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.model_id = m.id;
    rep.algorithm = Algorithm::ProbObs;
    rep.seed = options.seed;
    rep.prime = options.prime;
    PreparedModel pm = prepare_model(m, options);
    const AugmentedModel& a = pm.model;
    rep.caveats = pm.caveats;
    rep.warnings = pm.warnings;
    rep.dimension = a.dimension();
    const std::size_t N = options.truncation_order.value_or(a.dimension() + 1);
    rep.truncation_order = N;
    const std::vector<std::size_t> cols = free_columns(a);
    const Deadline deadline(options.time_budget);
    a.dag->set_interrupt(deadline.hook());

    SpecializeOptions so;
    so.sample_bound = options.sample_bound;
    so.retries = options.retries;
    so.known_input_derivs = options.known_input_derivs;

    struct Outcome1 {
        std::size_t rank;
        std::vector<std::size_t> deficient;
        bool operator==(const Outcome1&) const = default;
    };
    try {
        const auto sys = build_variational_system(a);
        auto run = [&](std::uint64_t seed) {
            SpecializedSystem spec = specialize(sys, seed, options.prime, N, so);
            spec.interrupt = deadline.hook();
            rep.retries += spec.retries;
            const VariationalSolution sol = solve_variational(spec, N);
            const FieldMatrix full = assemble_jacobian(sol, spec);
            FieldMatrix mat(full.modulus(), full.rows(), cols.size());
            for (std::size_t r = 0; r < full.rows(); ++r)
                for (std::size_t c = 0; c < cols.size(); ++c) mat(r, c) = full(r, cols[c]);
            Outcome1 out{rank(mat), {}};
            if (out.rank < cols.size())
                for (std::size_t c : deficient_columns(mat, cols.size())) out.deficient.push_back(cols[c]);
            return out;
        };
        const Outcome1 first = run(options.seed);
        if (!first.deficient.empty() && options.confirm) {
            const Outcome1 second = run(mix_seed(options.seed, 0x5eed));
            if (!(second == first))
                throw InconsistentResultError("classification changed between two independent specializations "
                                              "(rank " + std::to_string(first.rank) + " vs " +
                                              std::to_string(second.rank) + "); rerun with another seed or prime");
        }
        rep.rank = first.rank;
        rep.transcendence_degree = cols.size() - first.rank;
        rep.outcome = first.rank == cols.size() ? Outcome::Fispo : Outcome::Deficient;
        fill_verdicts(rep, a, first.deficient);
    } catch (const TimeoutError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = e.what();
    } catch (const RetryExhaustedError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = e.what();
    } catch (const InconsistentResultError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = e.what();
    }
    a.dag->set_interrupt({});
    rep.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace obsrank

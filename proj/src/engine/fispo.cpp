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

#include "obsrank/fispo.hpp"

#include <chrono>

#include "obsrank/errors.hpp"
#include "obsrank/pipeline.hpp"
#include "obsrank/rings.hpp"

namespace obsrank {

namespace {

/// Values of every DAG node at one point, extended lazily as the DAG grows.
class PointEvaluator {
public:
    PointEvaluator(const ExpressionDag& dag, const PrimeField& f, std::vector<std::optional<std::uint64_t>> symbols)
        : dag_(dag), f_(f), symbols_(std::move(symbols)) {}

    std::uint64_t value(NodeId id) {
        if (id >= values_.size()) extend(dag_.size());
        if (poisoned_[id]) {
            if (!is_rational(dag_, id))
                throw RationalityError("expression is not rational: " + dag_.to_string(id));
            throw ZeroDivisorError("denominator vanishes at the specialization point");
        }
        return values_[id];
    }

private:
    void extend(std::size_t upto) {
        values_.resize(upto, 0);
        poisoned_.resize(upto, 0);
        for (std::size_t id = done_; id < upto; ++id) {
            const Node& n = dag_.node(static_cast<NodeId>(id));
            bool bad = false;
            std::uint64_t v = 0;
            auto child = [&](std::uint32_t c) {
                bad = bad || poisoned_[c];
                return values_[c];
            };
            switch (n.kind) {
            case NodeKind::Constant: v = to_field(f_, dag_.constant_value(static_cast<NodeId>(id))); break;
            case NodeKind::Symbol: {
                const auto& s = n.lhs < symbols_.size() ? symbols_[n.lhs] : std::nullopt;
                if (!s) throw Error("symbol '" + dag_.symbol_name(n.lhs) + "' has no value at the point");
                v = *s;
                break;
            }
            case NodeKind::Add: v = f_.add(child(n.lhs), child(n.rhs)); break;
            case NodeKind::Sub: v = f_.sub(child(n.lhs), child(n.rhs)); break;
            case NodeKind::Mul: v = f_.mul(child(n.lhs), child(n.rhs)); break;
            case NodeKind::Div: {
                const std::uint64_t a = child(n.lhs), b = child(n.rhs);
                if (b == 0 || bad) {
                    bad = true;
                } else {
                    v = f_.mul(a, f_.inv(b));
                }
                break;
            }
            case NodeKind::Pow: {
                const std::uint64_t a = child(n.lhs);
                const Rational& q = dag_.exponent(static_cast<NodeId>(id));
                if (boost::multiprecision::denominator(q) != 1) {
                    bad = true;
                } else if (!bad) {
                    v = FieldRing{f_}.pow(a, q);
                }
                break;
            }
            default: bad = true; break;
            }
            values_[id] = v;
            poisoned_[id] = bad;
        }
        done_ = upto;
    }

    const ExpressionDag& dag_;
    PrimeField f_;
    std::vector<std::optional<std::uint64_t>> symbols_;
    std::vector<std::uint64_t> values_;
    std::vector<std::uint8_t> poisoned_;
    std::size_t done_ = 0;
};

std::vector<std::optional<std::uint64_t>> point_values(LieContext& ctx, const SpecializedSystem& spec) {
    const AugmentedModel& m = ctx.model();
    std::vector<std::optional<std::uint64_t>> out(m.dag->symbol_count());
    for (std::size_t c = 0; c < m.dimension(); ++c) out[m.components[c].symbol] = spec.x0[c];
    for (std::size_t q = 0; q < m.known_inputs.size(); ++q) {
        const auto& jets = ctx.input_jets(q);
        for (std::size_t j = 0; j < jets.size(); ++j) out[jets[j]] = spec.input_derivative(q, j);
    }
    return out;
}

/// Rows of blocks [from, to) restricted to `cols`, appended to `rows`.
void append_rows(const SymbolicObservabilityMatrix& om, std::size_t from, std::size_t to, const std::vector<std::size_t>& cols,
                 std::size_t n, PointEvaluator& eval, std::vector<std::uint64_t>& rows) {
    for (std::size_t k = from; k < to; ++k) {
        const std::size_t ny = om.lie[k].size();
        for (std::size_t r = 0; r < ny; ++r)
            for (std::size_t c : cols) rows.push_back(eval.value(om.blocks[k][r * n + c]));
    }
}

} // namespace

LieContext::LieContext(const AugmentedModel& m, std::optional<int> known_input_cap) : model_(m), cap_(known_input_cap) {
    for (const auto& u : m.known_inputs) jets_.push_back({u.symbol});
}

SymbolId LieContext::input_jet(std::size_t q, std::size_t level) {
    auto& jets = jets_.at(q);
    while (jets.size() <= level) {
        const std::string name = model_.known_inputs[q].name + "^(" + std::to_string(jets.size()) + ")";
        jets.push_back(model_.dag->declare(name));
    }
    return jets[level];
}

std::vector<NodeId> LieContext::gradient(NodeId e) {
    std::vector<NodeId> out;
    out.reserve(model_.dimension());
    for (const auto& c : model_.components) out.push_back(model_.dag->differentiate(e, c.symbol));
    return out;
}

NodeId LieContext::lie_derivative(NodeId prev) {
    ExpressionDag& dag = *model_.dag;
    NodeId sum = dag.zero();
    for (std::size_t c = 0; c < model_.dimension(); ++c) {
        const NodeId fc = model_.dynamics[c];
        if (dag.is_zero(fc) || !dag.may_depend_on(prev, model_.components[c].symbol)) continue;
        const NodeId d = dag.differentiate(prev, model_.components[c].symbol);
        if (!dag.is_zero(d)) sum = dag.add(sum, dag.mul(d, fc));
    }
    for (std::size_t q = 0; q < jets_.size(); ++q) {
        for (std::size_t j = 0; j < jets_[q].size(); ++j) {
            const SymbolId s = jets_[q][j];
            if (!dag.may_depend_on(prev, s)) continue;
            if (cap_ && static_cast<int>(j) + 1 > *cap_) continue;
            const NodeId d = dag.differentiate(prev, s);
            if (dag.is_zero(d)) continue;
            sum = dag.add(sum, dag.mul(d, dag.symbol(input_jet(q, j + 1))));
        }
    }
    return sum;
}

NodeId extended_lie_derivative(const AugmentedModel& m, NodeId prev, std::optional<int> known_input_cap) {
    LieContext ctx(m, known_input_cap);
    // Declare jets already present in prev so their derivatives are followed.
    for (std::size_t q = 0; q < m.known_inputs.size(); ++q) {
        for (std::size_t j = 1;; ++j) {
            const auto s = m.dag->find_symbol(m.known_inputs[q].name + "^(" + std::to_string(j) + ")");
            if (!s) break;
            ctx.input_jet(q, j);
        }
    }
    return ctx.lie_derivative(prev);
}

void append_block(SymbolicObservabilityMatrix& om, LieContext& ctx) {
    const AugmentedModel& m = ctx.model();
    if (om.columns.empty())
        for (const auto& c : m.components) om.columns.push_back(c.name);
    std::vector<NodeId> lie;
    if (om.lie.empty()) {
        lie = m.outputs;
    } else {
        for (NodeId prev : om.lie.back()) lie.push_back(ctx.lie_derivative(prev));
    }
    std::vector<NodeId> block;
    block.reserve(lie.size() * m.dimension());
    for (NodeId e : lie)
        for (NodeId d : ctx.gradient(e)) block.push_back(d);
    om.lie.push_back(std::move(lie));
    om.blocks.push_back(std::move(block));
}

SymbolicObservabilityMatrix observability_matrix(LieContext& ctx, std::size_t count) {
    SymbolicObservabilityMatrix om;
    while (om.orders() < count) append_block(om, ctx);
    return om;
}

FieldMatrix specialize_matrix(const SymbolicObservabilityMatrix& om, LieContext& ctx, const SpecializedSystem& spec) {
    const AugmentedModel& m = ctx.model();
    const std::size_t n = m.dimension();
    PointEvaluator eval(*m.dag, spec.field, point_values(ctx, spec));
    std::vector<std::size_t> cols(n);
    for (std::size_t c = 0; c < n; ++c) cols[c] = c;
    std::vector<std::uint64_t> rows;
    append_rows(om, 0, om.orders(), cols, n, eval, rows);
    return FieldMatrix(spec.field.modulus(), om.orders() * m.n_outputs(), n, std::move(rows));
}

AnalysisReport fispo_test(const OdeModel& m, const AnalysisOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.model_id = m.id;
    rep.algorithm = Algorithm::Fispo;
    rep.seed = options.seed;
    rep.prime = options.prime;
    PreparedModel pm = prepare_model(m, options);
    const AugmentedModel& a = pm.model;
    rep.caveats = pm.caveats;
    rep.warnings = pm.warnings;
    rep.dimension = a.dimension();
    const std::size_t n = a.dimension();
    const std::size_t ny = a.n_outputs();
    const std::vector<std::size_t> cols = free_columns(a);
    const std::size_t target = cols.size();

    std::size_t nd = options.min_lie_order ? static_cast<std::size_t>(*options.min_lie_order)
                                           : (n > ny ? (n - ny + ny - 1) / ny : 0);
    const std::size_t max_order = options.max_lie_order ? static_cast<std::size_t>(*options.max_lie_order) : n;
    nd = std::min(nd, max_order);

    const Deadline deadline(options.time_budget);
    ExpressionDag& dag = *a.dag;
    dag.set_interrupt(deadline.hook());
    SpecializeOptions so;
    so.sample_bound = options.sample_bound;
    so.retries = options.retries;
    so.known_input_derivs = options.known_input_derivs;

    struct Result {
        std::size_t rank;
        std::vector<std::size_t> deficient;
        bool operator==(const Result&) const = default;
    };
    auto classify = [&](const std::vector<std::uint64_t>& rows) {
        const FieldMatrix mat(options.prime, rows.size() / std::max<std::size_t>(target, 1), target, rows);
        Result r{target == 0 ? 0 : rank(mat), {}};
        if (r.rank < target)
            for (std::size_t c : deficient_columns(mat, target)) r.deficient.push_back(cols[c]);
        return r;
    };

    try {
        const auto sys = build_variational_system(a);
        dag.set_node_limit(options.node_budget);
        LieContext ctx(a, options.known_input_derivs);
        SymbolicObservabilityMatrix om;
        while (om.orders() <= nd) append_block(om, ctx);

        const SpecializedSystem spec = specialize(sys, options.seed, options.prime, max_order + 1, so);
        rep.retries += spec.retries;
        // Jets appear as blocks are added, so point values are refreshed per block.
        std::vector<std::uint64_t> rows;
        {
            PointEvaluator eval(dag, spec.field, point_values(ctx, spec));
            append_rows(om, 0, om.orders(), cols, n, eval, rows);
        }
        std::size_t r = target == 0 ? 0 : rank(FieldMatrix(options.prime, rows.size() / target, target, rows));
        while (r < target && om.orders() <= max_order) {
            deadline.check();
            append_block(om, ctx);
            PointEvaluator eval(dag, spec.field, point_values(ctx, spec));
            append_rows(om, om.orders() - 1, om.orders(), cols, n, eval, rows);
            const std::size_t r2 = rank(FieldMatrix(options.prime, rows.size() / target, target, rows));
            if (r2 == r) break;
            r = r2;
        }
        rep.lie_orders = om.orders();
        const Result first = classify(rows);

        if (options.confirm) {
            const SpecializedSystem spec2 = specialize(sys, mix_seed(options.seed, 0x5eed), options.prime, max_order + 1, so);
            rep.retries += spec2.retries;
            PointEvaluator eval(dag, spec2.field, point_values(ctx, spec2));
            std::vector<std::uint64_t> rows2;
            append_rows(om, 0, om.orders(), cols, n, eval, rows2);
            const Result second = classify(rows2);
            if (!(second == first))
                throw InconsistentResultError("classification changed between two specialization points (rank " +
                                              std::to_string(first.rank) + " vs " + std::to_string(second.rank) +
                                              "); rerun with another seed or prime");
        }
        rep.rank = first.rank;
        rep.transcendence_degree = target - first.rank;
        rep.outcome = first.rank == target ? Outcome::Fispo : Outcome::Deficient;
        fill_verdicts(rep, a, first.deficient);
    } catch (const BudgetExceededError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = std::string(e.what()) + "; the symbolic expressions grew past the node budget of " +
                      std::to_string(options.node_budget) + " nodes. Use --algorithm probobs for this model.";
    } catch (const TimeoutError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = std::string(e.what()) + ". Use --algorithm probobs for this model.";
    } catch (const RetryExhaustedError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = e.what();
    } catch (const InconsistentResultError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = e.what();
    } catch (const ZeroDivisorError& e) {
        rep.outcome = Outcome::Inconclusive;
        rep.message = std::string(e.what()) + "; try another seed";
    }
    dag.set_node_limit(0);
    dag.set_interrupt({});
    rep.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace obsrank

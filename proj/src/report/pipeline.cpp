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

#include "obsrank/pipeline.hpp"

#include <algorithm>
#include <set>

#include "obsrank/errors.hpp"

namespace obsrank {

PreparedModel prepare_model(const OdeModel& m, const AnalysisOptions& options) {
    options.validate();
    for (const auto& [name, cap] : options.unknown_derivs) {
        const bool known = std::any_of(m.unknown_inputs.begin(), m.unknown_inputs.end(),
                                       [&](const UnknownInput& w) { return w.name == name; });
        if (!known) throw Error("'" + name + "' is not an unknown input of " + m.id);
    }
    OdeModel work = options.fixed.empty() ? m.clone() : fix_variables(m, options.fixed);
    RationalizeOptions ro;
    ro.taylor_order = options.taylor_order;
    ro.center = options.taylor_center;
    auto [rational, report] = rationalize_model(work, ro);
    PreparedModel out;
    out.caveats = report.caveats();
    out.model = augment_with_unknown_inputs(augment_with_parameters(rational), options.unknown_derivs);
    out.warnings = out.model.warnings;
    return out;
}

Deadline::Deadline(double seconds)
    : active_(seconds > 0),
      end_(std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds))),
      seconds_(seconds) {}

void Deadline::check() const {
    if (active_ && std::chrono::steady_clock::now() > end_)
        throw TimeoutError("time budget of " + std::to_string(seconds_) + " s exceeded");
}

std::vector<std::size_t> free_columns(const AugmentedModel& m) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < m.dimension(); ++c)
        if (!m.components[c].known_value) out.push_back(c);
    return out;
}

void fill_verdicts(AnalysisReport& report, const AugmentedModel& m, const std::vector<std::size_t>& deficient) {
    const std::set<std::size_t> bad(deficient.begin(), deficient.end());
    report.verdicts.clear();
    for (std::size_t c = 0; c < m.dimension(); ++c) {
        const Component& comp = m.components[c];
        const bool d = bad.count(c) > 0;
        report.verdicts.push_back({comp.name, comp.kind, comp.level, verdict_for(comp.kind, d),
                                   d ? Confidence::Probabilistic : Confidence::CertifiedAtPoint});
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    // splitmix64 finalizer over the combined state.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace obsrank

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

#include "obsrank/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "obsrank/errors.hpp"

namespace obsrank {

namespace {

template <class E, std::size_t N>
E lookup(const char* const (&names)[N], const std::string& s, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (s == names[i]) return static_cast<E>(i);
    throw Error(std::string("unknown ") + what + " '" + s + "'");
}

const char* const kAlgorithms[] = {"fispo", "probobs"};
const char* const kVerdicts[] = {"identifiable",  "unidentifiable",  "observable",
                                 "unobservable",  "reconstructible", "not-reconstructible"};
const char* const kConfidences[] = {"certified-at-point", "probabilistic"};
const char* const kOutcomes[] = {"fispo", "deficient", "inconclusive"};
const char* const kKinds[] = {"state", "parameter", "input"};

} // namespace

const char* algorithm_name(Algorithm a) noexcept { return kAlgorithms[static_cast<int>(a)]; }
const char* verdict_name(Verdict v) noexcept { return kVerdicts[static_cast<int>(v)]; }
const char* confidence_name(Confidence c) noexcept { return kConfidences[static_cast<int>(c)]; }
const char* outcome_name(Outcome o) noexcept { return kOutcomes[static_cast<int>(o)]; }
Algorithm parse_algorithm(const std::string& s) { return lookup<Algorithm>(kAlgorithms, s, "algorithm"); }

Verdict verdict_for(ComponentKind kind, bool deficient) noexcept {
    switch (kind) {
    case ComponentKind::State: return deficient ? Verdict::Unobservable : Verdict::Observable;
    case ComponentKind::Parameter: return deficient ? Verdict::Unidentifiable : Verdict::Identifiable;
    default: return deficient ? Verdict::NotReconstructible : Verdict::Reconstructible;
    }
}

bool is_deficient(Verdict v) noexcept {
    return v == Verdict::Unidentifiable || v == Verdict::Unobservable || v == Verdict::NotReconstructible;
}

void AnalysisOptions::validate() const {
    for (const auto& [name, cap] : unknown_derivs)
        if (cap && *cap < 0) throw Error("derivative count for '" + name + "' must be non-negative");
    if (known_input_derivs && *known_input_derivs < 0) throw Error("known-input derivative count must be non-negative");
    if (max_lie_order && *max_lie_order < 0) throw Error("max Lie order must be non-negative");
    if (min_lie_order && *min_lie_order < 0) throw Error("min Lie order must be non-negative");
    if (taylor_order < 0) throw Error("Taylor order must be non-negative");
    if (retries < 0) throw Error("retry budget must be non-negative");
    if (sample_bound < 2) throw Error("sample bound must be at least 2");
    if (time_budget < 0) throw Error("time budget must be non-negative");
    if (!is_prime(prime) || prime >= (std::uint64_t{1} << 62)) throw Error("prime must be a prime below 2^62");
    if (truncation_order && (*truncation_order == 0 || *truncation_order >= prime))
        throw Error("truncation order must be positive and below the prime");
    if (sample_bound >= prime) throw Error("sample bound must be below the prime");
}

std::vector<std::string> AnalysisReport::deficient() const {
    std::vector<std::string> out;
    for (const auto& v : verdicts)
        if (is_deficient(v.verdict)) out.push_back(v.name);
    return out;
}

std::string AnalysisReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["model"] = model_id;
    j["algorithm"] = algorithm_name(algorithm);
    j["outcome"] = outcome_name(outcome);
    auto& vs = j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : verdicts) {
        vs.push_back({{"name", v.name},
                      {"tag", component_kind_name(v.tag)},
                      {"level", v.level},
                      {"verdict", verdict_name(v.verdict)},
                      {"confidence", confidence_name(v.confidence)}});
    }
    j["deficient"] = deficient();
    j["rank"] = rank;
    j["dimension"] = dimension;
    j["transcendence_degree"] = transcendence_degree;
    j["lie_orders"] = lie_orders;
    j["truncation_order"] = truncation_order;
    j["seed"] = seed;
    j["prime"] = prime;
    j["retries"] = retries;
    j["caveats"] = caveats;
    j["warnings"] = warnings;
    j["message"] = message;
    j["duration_seconds"] = duration_seconds;
    return j.dump(indent);
}

AnalysisReport AnalysisReport::from_json(const std::string& text) {
    AnalysisReport r;
    try {
        const auto j = nlohmann::json::parse(text);
        r.model_id = j.at("model").get<std::string>();
        r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        r.outcome = lookup<Outcome>(kOutcomes, j.at("outcome").get<std::string>(), "outcome");
        for (const auto& v : j.at("verdicts")) {
            r.verdicts.push_back({v.at("name").get<std::string>(),
                                  lookup<ComponentKind>(kKinds, v.at("tag").get<std::string>(), "tag"),
                                  v.at("level").get<int>(),
                                  lookup<Verdict>(kVerdicts, v.at("verdict").get<std::string>(), "verdict"),
                                  lookup<Confidence>(kConfidences, v.at("confidence").get<std::string>(), "confidence")});
        }
        r.rank = j.at("rank").get<std::size_t>();
        r.dimension = j.at("dimension").get<std::size_t>();
        r.transcendence_degree = j.at("transcendence_degree").get<std::size_t>();
        r.lie_orders = j.at("lie_orders").get<std::size_t>();
        r.truncation_order = j.at("truncation_order").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.prime = j.at("prime").get<std::uint64_t>();
        r.retries = j.at("retries").get<std::size_t>();
        r.caveats = j.at("caveats").get<std::vector<std::string>>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        r.message = j.at("message").get<std::string>();
        r.duration_seconds = j.at("duration_seconds").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string AnalysisReport::to_text() const {
    std::ostringstream s;
    s << "model:     " << model_id << "\n";
    s << "algorithm: " << algorithm_name(algorithm) << "\n";
    s << "outcome:   " << outcome_name(outcome) << "\n";
    if (!message.empty()) s << "message:   " << message << "\n";
    s << "rank:      " << rank << " of " << dimension << " (transcendence degree " << transcendence_degree << ")\n";
    if (algorithm == Algorithm::Fispo) {
        s << "lie orders: " << lie_orders << "\n";
    } else {
        s << "truncation order: " << truncation_order << "\n";
    }
    s << "seed:      " << seed << "\nprime:     " << prime << "\n";
    if (retries) s << "retries:   " << retries << "\n";
    std::size_t width = 0;
    for (const auto& v : verdicts) width = std::max(width, v.name.size());
    for (const auto& v : verdicts) {
        s << "  " << std::left << std::setw(static_cast<int>(width)) << v.name << "  " << std::setw(9)
          << component_kind_name(v.tag) << "  " << std::setw(19) << verdict_name(v.verdict) << "  ("
          << confidence_name(v.confidence) << ")\n";
    }
    for (const auto& c : caveats) s << "caveat: " << c << "\n";
    for (const auto& w : warnings) s << "warning: " << w << "\n";
    s << "duration:  " << duration_seconds << " s\n";
    return s.str();
}

} // namespace obsrank

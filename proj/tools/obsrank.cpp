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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "obsrank/analysis.hpp"
#include "obsrank/errors.hpp"

using namespace obsrank;

namespace {

constexpr int kExitFispo = 0;
constexpr int kExitDeficient = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

std::pair<std::string, std::string> split_binding(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) throw Error("expected NAME=VALUE, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

Rational signed_decimal(std::string v) {
    const bool negative = !v.empty() && v[0] == '-';
    const Rational q = parse_decimal(negative ? v.substr(1) : v);
    return negative ? Rational(-q) : q;
}

OdeModel load_model(const std::string& spec) {
    if (std::filesystem::exists(spec)) return parse_model_file(spec);
    if (spec.find('.') == std::string::npos) return load_entry(spec);
    throw Error("model file '" + spec + "' not found");
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text << "\n";
}

int exit_code(Outcome o) {
    switch (o) {
    case Outcome::Fispo: return kExitFispo;
    case Outcome::Deficient: return kExitDeficient;
    case Outcome::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural identifiability, observability and input reconstructibility of ODE models"};
    app.require_subcommand(1);

    std::string model_path, algorithm = "probobs", json_out;
    std::vector<std::string> fixes, caps;
    std::uint64_t seed = 1, prime = kDefaultPrime;
    std::optional<int> max_lie, known_derivs;
    int taylor_order = kDefaultTaylorOrder;
    double time_budget = 0;
    std::size_t node_budget = kDefaultNodeBudget;
    bool quiet = false;

    auto* analyze_cmd = app.add_subcommand("analyze", "Classify every state, parameter and unknown input of one model");
    analyze_cmd->add_option("--model", model_path, "Model file, or a corpus entry such as c2m/known-input")->required();
    analyze_cmd->add_option("--algorithm", algorithm, "Engine")->check(CLI::IsMember({"fispo", "probobs"}));
    analyze_cmd->add_option("--fix", fixes, "Treat a parameter as known, or give a state its initial value (NAME=VALUE)");
    analyze_cmd->add_option("--unknown-derivs", caps, "Nonzero derivatives of an unknown input (NAME=K or NAME=inf)");
    analyze_cmd->add_option("--known-derivs", known_derivs, "Highest nonzero derivative of the known inputs");
    analyze_cmd->add_option("--seed", seed, "Specialization seed")->envname("OBSRANK_SEED");
    analyze_cmd->add_option("--prime", prime, "Field modulus (a prime below 2^62)");
    analyze_cmd->add_option("--max-lie", max_lie, "fispo: highest Lie derivative order");
    analyze_cmd->add_option("--taylor-order", taylor_order, "Order of Taylor expansions of analytic functions");
    analyze_cmd->add_option("--time-budget", time_budget, "Wall-clock budget in seconds (0 = none)");
    analyze_cmd->add_option("--node-budget", node_budget, "fispo: expression node budget");
    analyze_cmd->add_option("--json", json_out, "Write the JSON report to this file ('-' for stdout)");
    analyze_cmd->add_flag("--quiet", quiet, "Do not print the text report");

    std::string suite, algorithms = "both", bench_json;
    double budget = 600;
    unsigned threads = 1;
    std::uint64_t bench_seed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Run a suite of corpus models and compare with the goldens");
    bench_cmd->add_option("--suite", suite, "Suite name from models/suites.json")->required();
    bench_cmd->add_option("--algorithms", algorithms, "Engines to run")->check(CLI::IsMember({"both", "fispo", "probobs"}));
    bench_cmd->add_option("--budget", budget, "Per-run wall-clock budget in seconds");
    bench_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "Specialization seed")->envname("OBSRANK_SEED");
    bench_cmd->add_option("--json", bench_json, "Write the JSON table to this file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (analyze_cmd->parsed()) {
            AnalysisOptions o;
            o.algorithm = parse_algorithm(algorithm);
            for (const auto& f : fixes) {
                const auto [name, value] = split_binding(f);
                o.fixed[name] = signed_decimal(value);
            }
            for (const auto& c : caps) {
                const auto [name, value] = split_binding(c);
                if (value == "inf") {
                    o.unknown_derivs[name] = std::nullopt;
                } else {
                    try {
                        o.unknown_derivs[name] = std::stoi(value);
                    } catch (const std::exception&) {
                        throw Error("derivative count for '" + name + "' must be an integer or inf, got '" + value + "'");
                    }
                }
            }
            o.known_input_derivs = known_derivs;
            o.seed = seed;
            o.prime = prime;
            o.max_lie_order = max_lie;
            o.taylor_order = taylor_order;
            o.time_budget = time_budget;
            o.node_budget = node_budget;
            const AnalysisReport r = analyze(load_model(model_path), o);
            if (!quiet && json_out != "-") std::cout << r.to_text();
            if (!json_out.empty()) write_output(json_out, r.to_json());
            return exit_code(r.outcome);
        }
        BenchOptions o;
        if (algorithms == "both") {
            o.algorithms = {Algorithm::Fispo, Algorithm::ProbObs};
        } else {
            o.algorithms = {parse_algorithm(algorithms)};
        }
        o.budget = budget;
        o.threads = threads;
        o.base.seed = bench_seed;
        BenchTable t = bench(load_suite(suite), o);
        t.suite = suite;
        if (bench_json != "-") std::cout << t.to_text();
        if (!bench_json.empty()) write_output(bench_json, t.to_json());
        return t.passed() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// Copyright 2026 The qdap Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdap/qdap.h"

int main(int argc, char **argv) {
    CLI::App app{"qdap: quantum-state diagnostics for asset pricing models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qdap_version());

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out;
    app.add_option("--config", config, "JSON run configuration")->required();
    app.add_option("--seed", seed, "Override the ensemble seed");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "Output directory");
    app.fallthrough();

    const char *commands[][2] = {
        {"estimate", "Fit the dividend-growth state-space model"},
        {"discretize", "Write the Markov chains"},
        {"solve", "Solve every model classically and with HHL"},
        {"diagnose", "Sparsity and condition numbers of the embedded systems"},
        {"measure", "Tail-event expectation table"},
        {"scan", "Ambiguity scans against the benchmark"},
        {"ensemble", "Draw the parameter ensemble"},
    };
    for (const auto &c : commands) {
        app.add_subcommand(c[0], c[1]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    nlohmann::json opts = {{"config", config}};
    if (seed) {
        opts["seed"] = *seed;
    }
    if (jobs) {
        opts["jobs"] = *jobs;
    }
    if (out) {
        opts["out"] = *out;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const int status = qdap_run(command.c_str(), opts.dump().c_str());
    if (status != QDAP_OK) {
        std::cerr << "qdap " << command << ": " << qdap_status_name(status) << ": "
                  << qdap_last_error() << '\n';
    }
    return qdap_exit_code(status);
}

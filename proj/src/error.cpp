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
#include "qdap/error.hpp"

namespace qdap {

const char *errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::domain: return "domain";
    case Errc::dimension: return "dimension";
    case Errc::index: return "index";
    case Errc::invalid_distribution: return "invalid-distribution";
    case Errc::convergence: return "convergence";
    case Errc::degenerate: return "degenerate";
    case Errc::singular: return "singular";
    case Errc::ill_conditioned: return "ill-conditioned";
    case Errc::no_solution: return "no-solution";
    case Errc::unitarity: return "unitarity";
    case Errc::phase_aliasing: return "phase-aliasing";
    case Errc::post_selection: return "post-selection";
    case Errc::integrity: return "numerical-integrity";
    case Errc::estimation: return "estimation-failure";
    case Errc::infeasible: return "infeasible-region";
    case Errc::zero_divergence: return "zero-divergence";
    case Errc::perfect_fit: return "perfect-fit";
    case Errc::cancellation: return "cancellation";
    case Errc::empty_operator: return "empty-operator";
    case Errc::regression: return "regression";
    case Errc::data: return "data";
    case Errc::parse: return "parse";
    case Errc::config: return "config";
    case Errc::io: return "io";
    case Errc::internal: return "internal";
    }
    return "unknown";
}

int exit_code_for(Errc code) noexcept {
    switch (code) {
    case Errc::config:
        return 2;
    case Errc::data:
    case Errc::parse:
    case Errc::io:
        return 3;
    default:
        return 4;
    }
}

} // namespace qdap

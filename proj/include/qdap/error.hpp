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
#pragma once

#include <stdexcept>
#include <string>

namespace qdap {

/// Error categories. Values match qdap_status in qdap.h.
enum class Errc : int {
    invalid_parameter = 1,
    domain = 2,
    dimension = 3,
    index = 4,
    invalid_distribution = 5,
    convergence = 6,
    degenerate = 7,
    singular = 8,
    ill_conditioned = 9,
    no_solution = 10,
    unitarity = 11,
    phase_aliasing = 12,
    post_selection = 13,
    integrity = 14,
    estimation = 15,
    infeasible = 16,
    zero_divergence = 17,
    perfect_fit = 18,
    cancellation = 19,
    empty_operator = 20,
    regression = 21,
    data = 22,
    parse = 23,
    config = 24,
    io = 25,
    internal = 99,
};

const char *errc_name(Errc code) noexcept;

/// Process exit code class: 2 config, 3 data, 4 numerical.
int exit_code_for(Errc code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string &what) {
    if (!cond) {
        throw Error(code, what);
    }
}

} // namespace qdap

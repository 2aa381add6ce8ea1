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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdap/markov.hpp"
#include "qdap/qsolver.hpp"

namespace qdap {

inline constexpr int kSchemaVersion = 1;

struct Series {
    std::vector<std::string> dates;
    std::vector<double> values;
};

/// Reads a `date,value` CSV. Parse errors name the offending line.
Series read_series_csv(const std::filesystem::path &path);

/// Shortest representation that round-trips.
std::string format_double(double v);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

nlohmann::json to_json(const DiscreteMarkovChain &chain);
DiscreteMarkovChain chain_from_json(const nlohmann::json &j);
nlohmann::json to_json(const QuantumState &state);
QuantumState state_from_json(const nlohmann::json &j);
nlohmann::json to_json(const Mat &m);
nlohmann::json to_json(const Vec &v);

} // namespace qdap

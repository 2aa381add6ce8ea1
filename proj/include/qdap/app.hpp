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
/**
 * @file
 * Run configuration and the pipeline commands behind the CLI.
 *
 * Every command reads one JSON config, writes its artifacts into the output
 * directory, and records a timestamp only in `run_metadata.json`.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdap/estimation.hpp"
#include "qdap/measurement.hpp"
#include "qdap/models.hpp"

namespace qdap {

enum class ModelKind { consumption, rare_disaster, gordon };

struct ModelConfig {
    std::string name;
    ModelKind kind = ModelKind::consumption;
    UtilitySpec utility;
    std::optional<std::pair<double, double>> sv; ///< (pi_G, gamma_G)
    RareDisasterSpec rd;
    bool rd_matched = true; ///< resilience grid size follows the consumption chain
    double kappa = 0.5;     ///< constant discounted growth for the gordon fixture
};

struct SvColumn {
    double pi_g = 0.8;
    double gamma_g = 0.3;
};

struct RunConfig {
    std::filesystem::path base_dir;
    std::filesystem::path dividends;
    std::filesystem::path riskfree;
    std::filesystem::path price_dividend;

    Ar1Params ar1{0.01037, 0.64079, 0.01520, 0.03630};
    Vec ar1_se = (Vec(4) << 0.00416, 0.00272, 0.00901, 0.25901).finished();
    bool estimate_parameters = false;
    double alpha0 = -0.8974;
    double alpha1 = 1.2038;
    FilterInit filter_init = FilterInit::zero;

    std::vector<ModelConfig> models;
    int n_abscissa = 4;

    int clock_qubits = 4;
    std::vector<std::string> modes{"classical", "ideal", "circuit"};
    std::vector<int> clock_sweep;
    std::optional<int> shots;

    std::string scan_benchmark = "crra_g10";
    std::vector<std::string> scan_targets{"ies1_g2"};
    std::vector<double> reference_p{0.5};
    std::vector<std::optional<std::pair<double, double>>> delta_ranges{std::nullopt};
    int grid_points = 2001;
    bool ensemble_benchmark = true;

    int ensemble_count = 1000;
    std::uint64_t seed = 42;
    WeightRule weight_rule = WeightRule::kl;

    std::vector<int> diagnose_abscissa{32, 64};
    double sparsity_threshold = 1e-5;

    std::vector<std::string> tail_rows{"crra_g10", "ies1_g2", "ies1_g10", "rare_disaster"};
    std::vector<SvColumn> tail_sv_columns{{0.8, 0.3}, {0.95, 0.01}};
    std::vector<Eigen::Index> tail_indices{0};
    bool tail_ensemble = false;

    std::filesystem::path output_dir = "out";
    int jobs = 1;

    [[nodiscard]] const ModelConfig &model(const std::string &name) const;
};

RunConfig parse_config(const nlohmann::json &j, const std::filesystem::path &base_dir);
RunConfig load_config(const std::filesystem::path &path);

/// Flag overrides applied on top of the config file.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::filesystem::path> out;
};
void apply_overrides(RunConfig &cfg, const RunOverrides &o);

/// A solved model at a given discretization size.
struct ModelSolution {
    std::string name;
    ModelKind kind = ModelKind::consumption;
    DiscreteMarkovChain chain;
    Mat A;
    Vec b;
    Vec nu;
};

ModelSolution solve_model(const RunConfig &cfg, const ModelConfig &model, int n_abscissa,
                          const Ar1Params &ar1);
ModelSolution solve_model(const RunConfig &cfg, const ModelConfig &model, int n_abscissa);

/// Parameter point used by every command: the config's table values or a fresh MLE.
EstimationResult parameter_estimate(const RunConfig &cfg);

/// KL-weighted superposition of ensemble pricing-error states for a consumption model.
QuantumState ensemble_error_state(const RunConfig &cfg, const ModelConfig &model,
                                  const DataState &d, const ModelEnsemble &ens);

DataState load_data_state(const RunConfig &cfg, int n_points);

struct ScanRecord {
    std::string target;
    double reference_p = 0.5;
    std::optional<std::pair<double, double>> delta_range;
    AmbiguityScan scan;
};
std::vector<ScanRecord> run_scans(const RunConfig &cfg);

struct TailRow {
    std::string model;
    std::vector<std::optional<double>> values; ///< without SV, then one per SV column
};
std::vector<TailRow> tail_table(const RunConfig &cfg);

struct DiagnoseRow {
    std::string model;
    int n_abscissa = 0;
    int sparsity = 0;
    double condition = 0.0;
};
std::vector<DiagnoseRow> diagnose(const RunConfig &cfg);

struct FidelityRow {
    std::string model;
    Eigen::Index n_states = 0;
    std::optional<double> ideal_vs_classical;
    std::optional<double> circuit_vs_classical;
    std::optional<double> circuit_vs_ideal;
    std::optional<double> success_probability;
};

/// Runs a named command ("estimate", "discretize", "solve", "diagnose",
/// "measure", "scan", "ensemble") and writes its artifacts.
void run_command(const std::string &command, const RunConfig &cfg);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

} // namespace qdap

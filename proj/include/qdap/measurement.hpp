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
 * Measurement of model solution states against data.
 *
 * A data state encodes an equally spaced price-dividend grid as amplitudes.
 * Models are judged through the pricing-error state |d - nu>, measured with
 * projectors, classical mixtures, tail operators, and the superposition
 * operator P_S with S = alpha |d> + e^{i delta} sqrt(1 - alpha^2) |B>.
 * The mixture weight p and the superposition weight alpha are tied by
 * alpha^2 = 1 - p.
 */
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qdap/qsolver.hpp"

namespace qdap {

struct DataState {
    QuantumState state;
    Vec grid;
    double source_min = 0.0;
    double source_max = 0.0;
};

/// Grid of `n_points` equally spaced values on [min, max]; amplitudes are the grid values.
DataState data_state(const std::vector<double> &observations, int n_points);

/// Alternative encoding: amplitudes follow the empirical CDF evaluated on the same grid.
DataState data_state_cdf(const std::vector<double> &observations, int n_points);

struct PricingErrorState {
    QuantumState state;
    double raw_norm = 0.0;
};

/// Normalized |d> - |nu>; `nu` is sorted ascending before normalization.
PricingErrorState pricing_error_state(const DataState &d, const Vec &nu);

enum class OperatorKind {
    projector,
    mixture,
    tail,
    phase_unitary,
    ambiguity_projector,
    density_mixture
};

struct MeasurementOperator {
    CMat matrix;
    OperatorKind kind = OperatorKind::projector;

    /// Checks the algebraic properties required by `kind`.
    void validate() const;
};

MeasurementOperator projector(const QuantumState &state);
MeasurementOperator projector(const CVec &v);

/// <phi|A|phi>. Hermitian kinds return a real value; an imaginary residue
/// above 1e-10 raises an integrity error.
cplx expectation(const MeasurementOperator &op, const QuantumState &target);
/// tr(A rho).
cplx expectation(const MeasurementOperator &op, const CMat &rho);

double cvm_loss(const DataState &d, const Vec &nu);

MeasurementOperator mixture_operator(double p, const MeasurementOperator &data_proj,
                                     const MeasurementOperator &bench_proj);

enum class TailWeights { data, unit };
MeasurementOperator tail_operator(const DataState &d, const std::vector<Eigen::Index> &bad,
                                  TailWeights weights = TailWeights::data);

/// e^{i theta} P + (I - P).
MeasurementOperator phase_operator(double theta, const MeasurementOperator &bench_proj);

struct Superposition {
    CVec vector;
    double norm = 0.0;
};
Superposition superposition_state(double alpha, double delta, const DataState &d,
                                  const QuantumState &benchmark);

struct AmbiguityDecomposition {
    double total = 0.0;
    double classical_part = 0.0;
    double quantum_part = 0.0;
    double r_d = 0.0;
    double r_b = 0.0;
    double phase_gap = 0.0;
};

/// Interference coefficient in <e|P_S|e> = classical + k alpha sqrt(1-alpha^2) r_d r_B cos(.).
inline constexpr double kInterference = 2.0;

AmbiguityDecomposition ambiguity_decomposition(double alpha, double delta, const DataState &d,
                                               const QuantumState &benchmark,
                                               const QuantumState &error_state,
                                               bool renormalize = false);

enum class MixMode { density, superposed };
struct MixedState {
    std::optional<CMat> density;
    std::optional<QuantumState> superposed;
};
MixedState mixed_state(const std::vector<QuantumState> &states, const std::vector<double> &weights,
                       MixMode mode);

struct ScanOptions {
    double reference_p = 0.5;
    int grid_points = 2001;
    std::optional<std::pair<double, double>> delta_range;
};

struct AmbiguityScan {
    Vec p_grid;
    Vec classical_loss;
    Vec envelope_low;
    Vec envelope_high;
    double reference_level = 0.0;
    double p_L = 0.0;
    double p_C = 0.0;
    double p_U = 1.0;
    std::optional<std::pair<double, double>> delta_range;
    double r_d = 0.0;
    double r_b = 0.0;
    double phase_gap = 0.0;
    bool p_C_found = false;
    bool p_L_clamped = false;
    bool p_U_clamped = false;
    bool degenerate = false;
    bool multiple_crossings = false;
    std::vector<double> crossings;
};

AmbiguityScan ambiguity_scan(const PricingErrorState &target, const DataState &d,
                             const QuantumState &benchmark, const ScanOptions &options = {});

/// Range of cos(x) for x in [lo, hi].
std::pair<double, double> cos_range(double lo, double hi);

} // namespace qdap

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
 * Dense statevector simulator and the HHL linear solver built on it.
 *
 * Qubit 0 is the least significant bit of the amplitude index. A register
 * [first, first + count) is read as an unsigned integer with `first` as its
 * least significant bit.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdap/types.hpp"

namespace qdap {

struct QuantumState {
    CVec amplitudes;
    int n_qubits = 0;
    Eigen::Index logical_dim = 0;

    [[nodiscard]] Eigen::Index dim() const { return amplitudes.size(); }
};

int qubits_for(Eigen::Index dim);

QuantumState prepare_state(const Vec &v);
QuantumState prepare_state(const CVec &v);
QuantumState basis_state(int n_qubits, Eigen::Index index);

/// Applies U to `targets`; targets[0] is the least significant bit of U's index.
QuantumState apply_unitary(const QuantumState &state, const CMat &U, std::span<const int> targets);

/// In-place variant with optional controls. Each control fires when its
/// qubit equals the matching entry of `control_values` (default 1).
void apply_gate(QuantumState &state, const CMat &U, std::span<const int> targets,
                std::span<const int> controls = {}, std::span<const int> control_values = {});

namespace gates {
CMat hadamard();
CMat pauli_x();
CMat phase(double theta);
CMat ry(double theta);
CMat swap();
} // namespace gates

QuantumState qft(const QuantumState &state, int first, int count);
QuantumState inverse_qft(const QuantumState &state, int first, int count);
void qft_inplace(QuantumState &state, int first, int count, bool inverse);

double fidelity(const QuantumState &a, const QuantumState &b);

struct HermitianSystem {
    Mat matrix;
    Vec rhs;
    Eigen::Index original_dim = 0;
};

/// [[0, A], [A^T, 0]] with right-hand side (b, 0).
HermitianSystem hermitian_embed(const Mat &A, const Vec &b);
/// Classical solution placed where the embedded system carries it: (0, x).
Vec embedded_solution(const Vec &x);

/// Normalized exact solution sum_i beta_i / lambda_i |a_i>.
QuantumState ideal_hhl(const HermitianSystem &sys);

struct HhlConfig {
    int clock_qubits = 4;
    double evolution_time = 0.0;    ///< <= 0 selects the default
    double rotation_constant = 0.0; ///< <= 0 selects the default
    std::optional<int> shots;
    std::uint64_t seed = 0;
};

struct HhlResult {
    QuantumState solution;
    double success_probability = 0.0;
    /// Ancilla = 1 frequency over `shots` samples when sampling is enabled.
    std::optional<double> sampled_success;
    double evolution_time = 0.0;
    double rotation_constant = 0.0;
};

/// Default evolution time: largest |eigenphase| (2^{m-1} - 1) / 2^m of a turn.
double default_evolution_time(double lambda_max, int clock_qubits);

HhlResult circuit_hhl(const HermitianSystem &sys, const HhlConfig &cfg);

int sparsity(const Mat &A, double threshold = 1e-5);
double condition_number(const Mat &A);

} // namespace qdap

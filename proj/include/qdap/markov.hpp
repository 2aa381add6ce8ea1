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
 * Finite Markov chains from quadrature discretization of AR(1) state
 * processes, Kronecker products with independent shocks, and ergodic
 * distributions.
 */
#pragma once

#include <cstddef>

#include "qdap/types.hpp"

namespace qdap {

/// Dividend-growth state space: dd_t = a + x_t + b e_t, x_t = rho x_{t-1} + c eps_t.
struct Ar1Params {
    double mean_level = 0.0; ///< a
    double rho = 0.0;
    double innov_sd = 0.0; ///< c
    double obs_sd = 0.0;   ///< b

    /// Throws invalid_parameter for non-finite or negative scales, domain for rho outside (0, 1).
    void validate() const;
    [[nodiscard]] double stationary_sd() const;
};

/**
 * Discrete state process.
 *
 * Base chains have strictly ascending abscissa. Chains produced by
 * kron_extend() index states as `base * n_shocks + shock` and repeat each
 * base abscissa once per shock; `shock_values`/`shock_probs` describe the
 * attached shock and are empty for base chains.
 */
struct DiscreteMarkovChain {
    Vec abscissa;
    Mat transition;
    Vec weights;
    Vec shock_values;
    Vec shock_probs;

    [[nodiscard]] Eigen::Index size() const { return abscissa.size(); }
    [[nodiscard]] Eigen::Index n_shocks() const {
        return shock_values.size() == 0 ? 1 : shock_values.size();
    }
    [[nodiscard]] Eigen::Index n_base() const { return size() / n_shocks(); }
    /// Base abscissa (one entry per base state).
    [[nodiscard]] Vec base_abscissa() const;
    /// Base quadrature weights, recovered by summing over shocks.
    [[nodiscard]] Vec base_weights() const;

    /// Row sums within 1e-12, entries in [0, 1], ordering of the abscissa.
    void validate() const;
};

/// Probabilists' Gauss-Hermite rule on N(0, 1); weights sum to one.
struct GaussHermiteRule {
    Vec nodes;
    Vec weights;
};
GaussHermiteRule gauss_hermite(int n_points);

DiscreteMarkovChain discretize_ar1(const Ar1Params &params, int n_points);

/// Transition probabilities from an arbitrary current state x onto the nodes.
Vec ar1_transition_row(const Ar1Params &params, const Vec &nodes, const Vec &weights, double x);

DiscreteMarkovChain kron_extend(const DiscreteMarkovChain &chain, const Vec &shock_values,
                                const Vec &shock_probs);

Vec ergodic_distribution(const DiscreteMarkovChain &chain, std::size_t max_iterations = 1000000);
Vec ergodic_distribution(const Mat &transition, std::size_t max_iterations = 1000000);

} // namespace qdap

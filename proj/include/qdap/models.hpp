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
 * Discrete pricing systems nu = (Psi o Pi) nu + b for consumption-based
 * models with constant or regime-switching volatility, and the variable
 * rare-disaster model on a resilience grid.
 */
#pragma once

#include <optional>

#include "qdap/markov.hpp"

namespace qdap {

enum class UtilityKind { crra, recursive_ies1 };

struct UtilitySpec {
    UtilityKind kind = UtilityKind::crra;
    double gamma = 1.0;
    double beta = 0.99;

    void validate() const;
};

/// log m_{t+1} = alpha0 + alpha1 x_t + xi w_{t+1}
struct SdfSpec {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double xi = 0.0;
};

/// Two volatility regimes. Regime 0 is the good regime.
struct SvSpec {
    double pi_g = 0.5;
    double gamma_g = 1.0;
    double b_g = 0.0;
    double b_b = 0.0;
    double xi_g = 0.0;
    double xi_b = 0.0;

    /// Derives b_G = gamma_G b, b_B = b (1 - gamma_G pi_G)/(1 - pi_G) and the regime loadings.
    static SvSpec make(double pi_g, double gamma_g, const Ar1Params &ar1,
                       const UtilitySpec &utility);
};

struct PricingSystem {
    Mat H;
    Mat M;
    Mat Pi;
    Mat Psi;
    Mat A;
    Vec b;
    Vec Bdiag;
    Mat C;

    [[nodiscard]] Eigen::Index size() const { return A.rows(); }
};

double xi_from_utility(const UtilitySpec &spec, const Ar1Params &ar1);

/// A = I - H o M o Pi, b = rowsum(H o M o Pi), B = sqrt(N) diag(b), C = B^{-1} A.
PricingSystem assemble_system(const Mat &H, const Mat &M, const Mat &Pi);

/// `chain` must carry the two-point shock (+1, -1) added by kron_extend().
PricingSystem build_system(const DiscreteMarkovChain &chain, const Ar1Params &ar1,
                           const SdfSpec &sdf, const std::optional<SvSpec> &sv = std::nullopt);

Vec solve_classical(const PricingSystem &sys);
Vec solve_dense(const Mat &A, const Vec &b);

/// Off-grid evaluation of the price-dividend ratio at base state x given
/// current shock index `shock`.
double nystrom_extend(const PricingSystem &sys, const Vec &nu, const DiscreteMarkovChain &chain,
                      const Ar1Params &ar1, const SdfSpec &sdf, double x,
                      const std::optional<SvSpec> &sv = std::nullopt, Eigen::Index shock = 0);

struct PerronPair {
    double rho = 0.0;
    Vec phi;
};
PerronPair long_run_eigenpair(const Mat &M, const Mat &Pi, std::size_t max_iterations = 1000000);

double compute_h_star(double p_dis, double recovery, double gamma);

struct RareDisasterSpec {
    double delta = 0.0657;
    double gamma = 4.0;
    double g_d = 0.025;
    double p_dis = 0.0363;
    double recovery = 0.66;
    double phi_h = 0.13;
    double h_star = 0.0;
    double sigma_h = 0.0;
    int n_states = 11;

    /// Default calibration with sigma_h = 0.1 H*.
    static RareDisasterSpec calibrated(int n_states = 11);
    /// Fills h_star and, if nonpositive, sigma_h = 0.1 h_star.
    void finalize();
    void validate() const;
};

struct RareDisasterSolution {
    DiscreteMarkovChain chain;
    Mat A;
    Vec nu;
    double discount = 0.0;
};

/// (I - kappa diag(1+h) Pi) nu = 1.
Vec solve_resilience_system(double kappa, const Vec &h, const Mat &Pi);

RareDisasterSolution solve_rare_disaster(const RareDisasterSpec &spec);

} // namespace qdap

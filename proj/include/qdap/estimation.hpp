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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qdap/markov.hpp"

namespace qdap {

enum class FilterInit { zero, stationary };

struct FilterResult {
    double loglik = 0.0;
    Vec filtered; ///< x_{t|t}
};

FilterResult kalman_filter(const Ar1Params &params, std::span<const double> series,
                           FilterInit init = FilterInit::zero);
double kalman_loglik(const Ar1Params &params, std::span<const double> series,
                     FilterInit init = FilterInit::zero);

/// Parameter vector order used for covariances: (a, b, c, rho).
Vec to_vector(const Ar1Params &p);
Ar1Params from_vector(const Vec &v);

struct EstimationResult {
    Ar1Params theta_hat;
    Mat covariance = Mat::Zero(4, 4);
    double loglik = 0.0;
    Vec standard_errors = Vec::Zero(4);
    bool boundary = false;
    bool covariance_projected = false;
    int starts_converged = 0;
    std::vector<double> start_logliks;
};

struct NelderMeadOptions {
    int max_evaluations = 20000;
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-9;
    double initial_step = 0.5;
};

struct NelderMeadResult {
    Vec x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f from x0. Non-finite values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const Vec &)> &f, const Vec &x0,
                             const NelderMeadOptions &options = {});

EstimationResult mle_fit(std::span<const double> series, FilterInit init = FilterInit::zero);

/// Covariance of the estimator from the inverse numerical Hessian of -loglik.
Mat hessian_covariance(const Ar1Params &theta, std::span<const double> series, FilterInit init,
                       bool *projected = nullptr);

struct SdfCalibration {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
};

/// alpha0 = mean(-log r_f); alpha1 = OLS slope of -log r_f on x_hat.
SdfCalibration calibrate_sdf(std::span<const double> filtered_states,
                             std::span<const double> riskfree_log);

enum class WeightRule { kl, inverse_kl, uniform };

struct ModelEnsemble {
    std::vector<Ar1Params> draws;
    Vec kl_divergences;
    Vec weights;
    std::uint64_t attempts = 0;
};

/// Draws from N(theta_hat, covariance); vectors violating the AR(1) constraints are rejected.
ModelEnsemble sample_ensemble(const EstimationResult &result, int count, std::uint64_t seed,
                              int jobs = 1);
Vec ensemble_weights(const Vec &kl, WeightRule rule);
ModelEnsemble draw_ensemble(const EstimationResult &result, int count, std::uint64_t seed,
                            WeightRule rule = WeightRule::kl, int jobs = 1);

/// Unrestricted draws from N(mean, cov) with the attempt-indexed generator.
std::vector<Vec> gaussian_draws(const Vec &mean, const Mat &cov, int count, std::uint64_t seed);
/// 0.5 (x - mean)' cov^+ (x - mean).
double kl_divergence(const Vec &x, const Vec &mean, const Mat &cov_pinv);
Mat pseudo_inverse(const Mat &cov);

/// Simulates the state-space model; used by tests and data generation.
std::vector<double> simulate_dividend_growth(const Ar1Params &params, int length,
                                             std::uint64_t seed);

} // namespace qdap

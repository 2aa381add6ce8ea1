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
#include "qdap/markov.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qdap/error.hpp"

namespace qdap {

void Ar1Params::validate() const {
    require(std::isfinite(mean_level) && std::isfinite(rho) && std::isfinite(innov_sd) &&
                std::isfinite(obs_sd),
            Errc::invalid_parameter, "AR(1) parameters must be finite");
    require(innov_sd > 0.0, Errc::invalid_parameter, "innovation s.d. must be positive");
    require(obs_sd >= 0.0, Errc::invalid_parameter, "observation s.d. must be nonnegative");
    // rho = 0 is the iid boundary and still defines a valid chain.
    require(rho >= 0.0 && rho < 1.0, Errc::domain,
            "persistence must lie in [0, 1), got " + std::to_string(rho));
}

double Ar1Params::stationary_sd() const { return innov_sd / std::sqrt(1.0 - rho * rho); }

Vec DiscreteMarkovChain::base_abscissa() const {
    const auto s = n_shocks();
    Vec out(n_base());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out(i) = abscissa(i * s);
    }
    return out;
}

Vec DiscreteMarkovChain::base_weights() const {
    const auto s = n_shocks();
    Vec out = Vec::Zero(n_base());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        for (Eigen::Index t = 0; t < s; ++t) {
            out(i) += weights(i * s + t);
        }
    }
    return out;
}

void DiscreteMarkovChain::validate() const {
    const auto n = size();
    require(transition.rows() == n && transition.cols() == n && weights.size() == n,
            Errc::dimension, "chain components disagree in size");
    for (Eigen::Index j = 0; j < n; ++j) {
        require(std::abs(transition.row(j).sum() - 1.0) <= 1e-12, Errc::invalid_distribution,
                "transition row " + std::to_string(j) + " does not sum to one");
    }
    require(transition.minCoeff() >= 0.0 && transition.maxCoeff() <= 1.0,
            Errc::invalid_distribution, "transition entries outside [0, 1]");
    const bool strict = shock_values.size() == 0;
    for (Eigen::Index j = 1; j < n; ++j) {
        const bool ok = strict ? abscissa(j) > abscissa(j - 1) : abscissa(j) >= abscissa(j - 1);
        require(ok, Errc::invalid_parameter, "abscissa not ascending");
    }
}

GaussHermiteRule gauss_hermite(int n_points) {
    require(n_points >= 1, Errc::invalid_parameter, "quadrature needs at least one node");
    const Eigen::Index n = n_points;
    // Golub-Welsch: He_{k+1} = x He_k - k He_{k-1}.
    Mat jacobi = Mat::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
    Vec nodes = es.eigenvalues();
    Vec weights = es.eigenvectors().row(0).transpose().array().square();

    GaussHermiteRule rule{Vec(n), Vec(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index m = n - 1 - i;
        rule.nodes(i) = 0.5 * (nodes(i) - nodes(m));
        rule.weights(i) = 0.5 * (weights(i) + weights(m));
    }
    rule.weights /= rule.weights.sum();
    return rule;
}

Vec ar1_transition_row(const Ar1Params &params, const Vec &nodes, const Vec &weights, double x) {
    const double c = params.innov_sd;
    const double sx = params.stationary_sd();
    const double mean = params.rho * x;
    // f(y|x) / omega(y) * w, with omega the stationary density.
    Vec logp(nodes.size());
    for (Eigen::Index k = 0; k < nodes.size(); ++k) {
        const double y = nodes(k);
        const double dz = (y - mean) / c;
        const double z = y / sx;
        logp(k) = -0.5 * dz * dz + 0.5 * z * z + std::log(sx / c) + std::log(weights(k));
    }
    const double top = logp.maxCoeff();
    Vec row = (logp.array() - top).exp().matrix();
    return row / row.sum();
}

DiscreteMarkovChain discretize_ar1(const Ar1Params &params, int n_points) {
    params.validate();
    require(n_points >= 2, Errc::invalid_parameter, "n_points must be at least 2");
    const auto rule = gauss_hermite(n_points);
    const double sx = params.stationary_sd();

    DiscreteMarkovChain chain;
    chain.abscissa = sx * rule.nodes;
    chain.weights = rule.weights;
    chain.transition.resize(n_points, n_points);
    for (int j = 0; j < n_points; ++j) {
        chain.transition.row(j) =
            ar1_transition_row(params, chain.abscissa, chain.weights, chain.abscissa(j)).transpose();
    }
    return chain;
}

DiscreteMarkovChain kron_extend(const DiscreteMarkovChain &chain, const Vec &shock_values,
                                const Vec &shock_probs) {
    require(shock_values.size() == shock_probs.size() && shock_values.size() > 0,
            Errc::dimension, "shock values and probabilities differ in length");
    require(chain.shock_values.size() == 0, Errc::invalid_parameter,
            "chain already carries a shock");
    require(shock_probs.minCoeff() >= 0.0, Errc::invalid_distribution,
            "shock probabilities must be nonnegative");
    require(std::abs(shock_probs.sum() - 1.0) <= 1e-10, Errc::invalid_distribution,
            "shock probabilities must sum to one");

    const Eigen::Index n = chain.size();
    const Eigen::Index s = shock_values.size();
    DiscreteMarkovChain out;
    out.shock_values = shock_values;
    out.shock_probs = shock_probs;
    out.abscissa.resize(n * s);
    out.weights.resize(n * s);
    out.transition.resize(n * s, n * s);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index t = 0; t < s; ++t) {
            out.abscissa(i * s + t) = chain.abscissa(i);
            out.weights(i * s + t) = chain.weights(i) * shock_probs(t);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index r = 0; r < s; ++r) {
                for (Eigen::Index t = 0; t < s; ++t) {
                    out.transition(j * s + r, k * s + t) = chain.transition(j, k) * shock_probs(t);
                }
            }
        }
    }
    return out;
}

Vec ergodic_distribution(const Mat &transition, std::size_t max_iterations) {
    const Eigen::Index n = transition.rows();
    require(n > 0 && transition.cols() == n, Errc::dimension, "transition must be square");
    Vec pi = Vec::Constant(n, 1.0 / static_cast<double>(n));
    const Mat pt = transition.transpose();
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Vec next = pt * pi;
        next /= next.sum();
        const double diff = (next - pi).cwiseAbs().maxCoeff();
        pi = std::move(next);
        if (diff < 1e-13) {
            return pi;
        }
    }
    fail(Errc::convergence, "ergodic distribution did not converge; chain may be reducible or "
                            "periodic");
}

Vec ergodic_distribution(const DiscreteMarkovChain &chain, std::size_t max_iterations) {
    return ergodic_distribution(chain.transition, max_iterations);
}

} // namespace qdap

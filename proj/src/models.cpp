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
#include "qdap/models.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qdap/error.hpp"

namespace qdap {

void UtilitySpec::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, Errc::invalid_parameter,
            "risk aversion must be positive");
    require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, Errc::invalid_parameter,
            "discount factor must lie in (0, 1)");
}

double xi_from_utility(const UtilitySpec &spec, const Ar1Params &ar1) {
    spec.validate();
    require(std::isfinite(ar1.obs_sd) && std::isfinite(ar1.innov_sd) && std::isfinite(ar1.rho),
            Errc::invalid_parameter, "AR(1) parameters must be finite");
    const double b = ar1.obs_sd;
    if (spec.kind == UtilityKind::crra) {
        return -b * spec.gamma;
    }
    const double br = spec.beta * ar1.rho;
    require(br < 1.0, Errc::singular, "beta * rho must be below one");
    const double lr = ar1.innov_sd * spec.beta / (1.0 - br);
    return lr - (lr + b) * spec.gamma;
}

SvSpec SvSpec::make(double pi_g, double gamma_g, const Ar1Params &ar1,
                    const UtilitySpec &utility) {
    require(pi_g > 0.0 && pi_g < 1.0, Errc::invalid_parameter, "pi_G must lie in (0, 1)");
    // gamma_G = 1 is admitted as the constant-volatility limit.
    require(gamma_g > 0.0 && gamma_g <= 1.0, Errc::invalid_parameter,
            "gamma_G must lie in (0, 1]");
    SvSpec sv;
    sv.pi_g = pi_g;
    sv.gamma_g = gamma_g;
    sv.b_g = gamma_g * ar1.obs_sd;
    sv.b_b = ar1.obs_sd * (1.0 - gamma_g * pi_g) / (1.0 - pi_g);
    Ar1Params good = ar1;
    good.obs_sd = sv.b_g;
    Ar1Params bad = ar1;
    bad.obs_sd = sv.b_b;
    sv.xi_g = xi_from_utility(utility, good);
    sv.xi_b = xi_from_utility(utility, bad);
    return sv;
}

PricingSystem assemble_system(const Mat &H, const Mat &M, const Mat &Pi) {
    const Eigen::Index n = Pi.rows();
    require(n > 0 && Pi.cols() == n && H.rows() == n && H.cols() == n && M.rows() == n &&
                M.cols() == n,
            Errc::dimension, "H, M and Pi must be square and of equal size");
    PricingSystem sys;
    sys.H = H;
    sys.M = M;
    sys.Pi = Pi;
    sys.Psi = H.cwiseProduct(M);
    const Mat kernel = sys.Psi.cwiseProduct(Pi);
    sys.A = Mat::Identity(n, n) - kernel;
    sys.b = kernel.rowwise().sum();
    for (Eigen::Index j = 0; j < n; ++j) {
        require(std::isfinite(sys.b(j)) && sys.b(j) > 0.0, Errc::degenerate,
                "payoff row " + std::to_string(j) + " is not positive; B is not invertible");
    }
    sys.Bdiag = std::sqrt(static_cast<double>(n)) * sys.b;
    sys.C = sys.Bdiag.cwiseInverse().asDiagonal() * sys.A;
    return sys;
}

namespace {

struct ShockLoadings {
    Vec vol;
    Vec xi;
};

ShockLoadings loadings(const Ar1Params &ar1, const SdfSpec &sdf, const std::optional<SvSpec> &sv) {
    ShockLoadings l{Vec(2), Vec(2)};
    if (sv) {
        l.vol << sv->b_g, sv->b_b;
        l.xi << sv->xi_g, sv->xi_b;
    } else {
        l.vol.setConstant(ar1.obs_sd);
        l.xi.setConstant(sdf.xi);
    }
    return l;
}

} // namespace

PricingSystem build_system(const DiscreteMarkovChain &chain, const Ar1Params &ar1,
                           const SdfSpec &sdf, const std::optional<SvSpec> &sv) {
    require(chain.shock_values.size() == 2, Errc::dimension,
            "pricing systems need a chain extended with a two-point shock");
    require(std::isfinite(sdf.alpha0) && std::isfinite(sdf.alpha1) && std::isfinite(sdf.xi),
            Errc::invalid_parameter, "SDF loadings must be finite");
    const Eigen::Index n = chain.size();
    const auto l = loadings(ar1, sdf, sv);
    const Vec &v = chain.shock_values;

    Mat H(n, n);
    Mat M(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        const double x = chain.abscissa(q);
        const Eigen::Index s = q % 2;
        const double growth = std::exp(ar1.mean_level + x);
        const double sdf_level = std::exp(sdf.alpha0 + sdf.alpha1 * x);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Eigen::Index t = r % 2;
            H(q, r) = growth * std::exp(l.vol(s) * v(t));
            M(q, r) = sdf_level * std::exp(l.xi(s) * v(t));
        }
    }
    return assemble_system(H, M, chain.transition);
}

Vec solve_dense(const Mat &A, const Vec &b) {
    require(A.rows() == A.cols() && A.rows() == b.size(), Errc::dimension,
            "system dimensions disagree");
    const double scale = A.cwiseAbs().maxCoeff();
    require(std::isfinite(scale) && scale > 0.0, Errc::singular, "matrix is zero or non-finite");
    Eigen::PartialPivLU<Mat> lu(A);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    require(pivot >= 1e-14 * scale, Errc::singular, "matrix is numerically singular");
    Vec x = lu.solve(b);
    require(x.allFinite(), Errc::singular, "solution is not finite");
    const double bnorm = b.cwiseAbs().maxCoeff();
    const double resid = (A * x - b).cwiseAbs().maxCoeff();
    require(resid <= 1e-10 * std::max(bnorm, 1e-300), Errc::singular,
            "residual check failed for dense solve");
    return x;
}

Vec solve_classical(const PricingSystem &sys) { return solve_dense(sys.A, sys.b); }

double nystrom_extend(const PricingSystem &sys, const Vec &nu, const DiscreteMarkovChain &chain,
                      const Ar1Params &ar1, const SdfSpec &sdf, double x,
                      const std::optional<SvSpec> &sv, Eigen::Index shock) {
    require(std::isfinite(x), Errc::domain, "evaluation point must be finite");
    require(nu.size() == sys.size() && chain.size() == sys.size(), Errc::dimension,
            "solution and chain do not match the system");
    require(chain.shock_values.size() == 2 && shock >= 0 && shock < 2, Errc::index,
            "shock index out of range");
    const Vec nodes = chain.base_abscissa();
    const Vec w = chain.base_weights();
    const Vec row = ar1_transition_row(ar1, nodes, w, x);
    const auto l = loadings(ar1, sdf, sv);
    const double growth = std::exp(ar1.mean_level + x);
    const double sdf_level = std::exp(sdf.alpha0 + sdf.alpha1 * x);

    double total = 0.0;
    for (Eigen::Index k = 0; k < nodes.size(); ++k) {
        for (Eigen::Index t = 0; t < 2; ++t) {
            const double v = chain.shock_values(t);
            const double psi =
                growth * std::exp(l.vol(shock) * v) * sdf_level * std::exp(l.xi(shock) * v);
            total += (1.0 + nu(2 * k + t)) * psi * row(k) * chain.shock_probs(t);
        }
    }
    return total;
}

PerronPair long_run_eigenpair(const Mat &M, const Mat &Pi, std::size_t max_iterations) {
    require(M.rows() == Pi.rows() && M.cols() == Pi.cols() && M.rows() == M.cols(),
            Errc::dimension, "M and Pi must be square and equal in size");
    require(M.allFinite() && Pi.allFinite(), Errc::invalid_parameter,
            "matrices must be finite");
    const Mat K = M.cwiseProduct(Pi);
    const Eigen::Index n = K.rows();
    Vec phi = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Vec next = K * phi;
        const double norm = next.norm();
        require(norm > 0.0, Errc::convergence, "operator annihilates the iterate");
        next /= norm;
        const double diff = (next - phi).cwiseAbs().maxCoeff();
        phi = std::move(next);
        if (diff < 1e-13) {
            return {(K * phi).norm(), phi};
        }
    }
    fail(Errc::convergence, "Perron iteration did not converge");
}

double compute_h_star(double p_dis, double recovery, double gamma) {
    require(p_dis >= 0.0 && p_dis < 1.0, Errc::invalid_parameter,
            "disaster probability must lie in [0, 1)");
    require(recovery > 0.0, Errc::invalid_parameter, "recovery rate must be positive");
    const double h = p_dis * (std::pow(recovery, 1.0 - gamma) - 1.0);
    require(std::isfinite(h), Errc::invalid_parameter, "H* is not finite");
    return h;
}

RareDisasterSpec RareDisasterSpec::calibrated(int n_states) {
    RareDisasterSpec spec;
    spec.n_states = n_states;
    spec.finalize();
    return spec;
}

void RareDisasterSpec::finalize() {
    h_star = compute_h_star(p_dis, recovery, gamma);
    if (!(sigma_h > 0.0)) {
        sigma_h = 0.1 * h_star;
    }
}

void RareDisasterSpec::validate() const {
    require(std::isfinite(delta) && std::isfinite(g_d) && std::isfinite(gamma),
            Errc::invalid_parameter, "rare-disaster rates must be finite");
    require(p_dis > 0.0 && p_dis < 1.0, Errc::invalid_parameter,
            "disaster probability must lie in (0, 1)");
    require(recovery > 0.0 && recovery < 1.0, Errc::invalid_parameter,
            "recovery rate must lie in (0, 1)");
    require(phi_h > 0.0 && std::isfinite(phi_h), Errc::invalid_parameter,
            "mean reversion must be positive");
    require(sigma_h > 0.0 && std::isfinite(sigma_h), Errc::invalid_parameter,
            "resilience innovation s.d. must be positive");
    require(n_states >= 3, Errc::invalid_parameter, "need at least three resilience states");
    require(std::abs(h_star - compute_h_star(p_dis, recovery, gamma)) == 0.0,
            Errc::invalid_parameter, "H* is inconsistent with p, B and gamma");
}

Vec solve_resilience_system(double kappa, const Vec &h, const Mat &Pi) {
    const Eigen::Index n = h.size();
    require(Pi.rows() == n && Pi.cols() == n, Errc::dimension,
            "resilience grid and transition differ in size");
    const Mat K = kappa * (Vec::Ones(n) + h).asDiagonal() * Pi;
    const double radius = Eigen::EigenSolver<Mat>(K, false).eigenvalues().cwiseAbs().maxCoeff();
    require(radius < 1.0, Errc::no_solution,
            "discounted resilience operator has spectral radius " + std::to_string(radius) +
                " >= 1; the price-dividend ratio diverges");
    return solve_dense(Mat::Identity(n, n) - K, Vec::Ones(n));
}

RareDisasterSolution solve_rare_disaster(const RareDisasterSpec &spec) {
    spec.validate();
    const int n = spec.n_states;
    const double ar = std::exp(-spec.phi_h);
    const double sd_stat = spec.sigma_h / std::sqrt(1.0 - ar * ar);
    const Vec grid = Vec::LinSpaced(n, -3.0 * sd_stat, 3.0 * sd_stat);
    const double hs = spec.h_star;

    RareDisasterSolution out;
    out.chain.abscissa = grid;
    out.chain.weights = Vec::Constant(n, 1.0 / n);
    out.chain.transition.resize(n, n);
    for (int j = 0; j < n; ++j) {
        const double h = grid(j);
        const double mean = (1.0 + hs) / (1.0 + hs + h) * ar * h;
        Vec logp(n);
        for (int k = 0; k < n; ++k) {
            const double z = (grid(k) - mean) / spec.sigma_h;
            logp(k) = -0.5 * z * z;
        }
        Vec row = (logp.array() - logp.maxCoeff()).exp().matrix();
        out.chain.transition.row(j) = (row / row.sum()).transpose();
    }
    out.discount = std::exp(-spec.delta + spec.g_d);
    out.nu = solve_resilience_system(out.discount, grid, out.chain.transition);
    out.A = Mat::Identity(n, n) -
            out.discount * (Vec::Ones(n) + grid).asDiagonal() * out.chain.transition;
    require(out.nu.minCoeff() > 0.0, Errc::no_solution,
            "price-dividend ratio is not positive on the resilience grid");
    return out;
}

} // namespace qdap

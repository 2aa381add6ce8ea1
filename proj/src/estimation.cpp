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
#include "qdap/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qdap/error.hpp"

namespace qdap {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kScaleFloor = 1e-7;
constexpr double kRhoClamp = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

FilterResult kalman_filter(const Ar1Params &params, std::span<const double> series,
                           FilterInit init) {
    require(series.size() >= 8, Errc::data, "series needs at least 8 observations");
    require(std::isfinite(params.mean_level) && std::isfinite(params.rho) &&
                std::isfinite(params.innov_sd) && std::isfinite(params.obs_sd),
            Errc::invalid_parameter, "filter parameters must be finite");
    require(params.innov_sd >= 0.0 && params.obs_sd >= 0.0, Errc::invalid_parameter,
            "standard deviations must be nonnegative");
    require(std::abs(params.rho) < 1.0, Errc::domain, "persistence must lie in (-1, 1)");

    const double rho = params.rho;
    const double q = params.innov_sd * params.innov_sd;
    const double r = params.obs_sd * params.obs_sd;
    double x = 0.0;
    double P = init == FilterInit::stationary ? q / (1.0 - rho * rho) : 0.0;

    FilterResult out;
    out.filtered.resize(static_cast<Eigen::Index>(series.size()));
    double ll = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double y = series[t];
        require(std::isfinite(y), Errc::data,
                "non-finite observation at index " + std::to_string(t));
        const double x_pred = rho * x;
        const double P_pred = rho * rho * P + q;
        const double F = P_pred + r;
        require(F > 1e-300, Errc::degenerate, "innovation variance is zero");
        const double v = y - params.mean_level - x_pred;
        ll -= 0.5 * (kLog2Pi + std::log(F) + v * v / F);
        const double K = P_pred / F;
        x = x_pred + K * v;
        P = P_pred * (1.0 - K);
        out.filtered(static_cast<Eigen::Index>(t)) = x;
    }
    out.loglik = ll;
    return out;
}

double kalman_loglik(const Ar1Params &params, std::span<const double> series, FilterInit init) {
    return kalman_filter(params, series, init).loglik;
}

Vec to_vector(const Ar1Params &p) {
    Vec v(4);
    v << p.mean_level, p.obs_sd, p.innov_sd, p.rho;
    return v;
}

Ar1Params from_vector(const Vec &v) {
    require(v.size() == 4, Errc::dimension, "parameter vector must have four entries");
    return {v(0), v(3), v(2), v(1)};
}

NelderMeadResult nelder_mead(const std::function<double(const Vec &)> &f, const Vec &x0,
                             const NelderMeadOptions &options) {
    const Eigen::Index n = x0.size();
    auto eval = [&](const Vec &x, int &count) {
        ++count;
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    };
    NelderMeadResult res;
    std::vector<Vec> simplex(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> values(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        simplex[static_cast<std::size_t>(i + 1)](i) += options.initial_step;
    }
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
        values[i] = eval(simplex[i], res.evaluations);
    }
    std::vector<std::size_t> order(values.size());

    while (res.evaluations < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        double spread = 0.0;
        for (const auto &x : simplex) {
            spread = std::max(spread, (x - simplex[best]).cwiseAbs().maxCoeff());
        }
        const double fspread = values[worst] - values[best];
        if (std::isfinite(values[best]) && fspread <= options.f_tolerance * (1.0 + std::abs(values[best])) &&
            spread <= options.x_tolerance * (1.0 + simplex[best].cwiseAbs().maxCoeff())) {
            res.converged = true;
            break;
        }

        Vec centroid = Vec::Zero(n);
        for (std::size_t i : order) {
            if (i != worst) {
                centroid += simplex[i];
            }
        }
        centroid /= static_cast<double>(n);

        const Vec xr = centroid + (centroid - simplex[worst]);
        const double fr = eval(xr, res.evaluations);
        if (fr < values[best]) {
            const Vec xe = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = eval(xe, res.evaluations);
            if (fe < fr) {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid))
                               : Vec(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = eval(xc, res.evaluations);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) {
                continue;
            }
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = eval(simplex[i], res.evaluations);
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    res.x = simplex[static_cast<std::size_t>(it - values.begin())];
    res.value = *it;
    return res;
}

namespace {

Ar1Params decode(const Vec &u) {
    Ar1Params p;
    p.mean_level = u(0);
    p.obs_sd = kScaleFloor + std::exp(u(1));
    p.innov_sd = kScaleFloor + std::exp(u(2));
    p.rho = std::clamp(1.0 / (1.0 + std::exp(-u(3))), kRhoClamp, 1.0 - kRhoClamp);
    return p;
}

Vec encode(const Ar1Params &p) {
    Vec u(4);
    u(0) = p.mean_level;
    u(1) = std::log(std::max(p.obs_sd - kScaleFloor, 1e-300));
    u(2) = std::log(std::max(p.innov_sd - kScaleFloor, 1e-300));
    const double r = std::clamp(p.rho, kRhoClamp, 1.0 - kRhoClamp);
    u(3) = std::log(r / (1.0 - r));
    return u;
}

double safe_negloglik(const Ar1Params &p, std::span<const double> series, FilterInit init) {
    try {
        return -kalman_loglik(p, series, init);
    } catch (const Error &) {
        return kInf;
    }
}

} // namespace

Mat hessian_covariance(const Ar1Params &theta, std::span<const double> series, FilterInit init,
                       bool *projected) {
    const Vec t0 = to_vector(theta);
    Vec h(4);
    for (int i = 0; i < 4; ++i) {
        h(i) = 1e-4 * std::max(std::abs(t0(i)), 1e-3);
    }
    // Keep the stencil inside the admissible region.
    h(1) = std::min(h(1), 0.5 * t0(1));
    h(2) = std::min(h(2), 0.5 * t0(2));
    h(3) = std::min({h(3), 0.5 * t0(3), 0.5 * (1.0 - t0(3))});

    auto f = [&](const Vec &t) { return safe_negloglik(from_vector(t), series, init); };
    const double f0 = f(t0);
    Mat H(4, 4);
    for (int i = 0; i < 4; ++i) {
        Vec tp = t0;
        Vec tm = t0;
        tp(i) += h(i);
        tm(i) -= h(i);
        H(i, i) = (f(tp) - 2.0 * f0 + f(tm)) / (h(i) * h(i));
        for (int j = 0; j < i; ++j) {
            Vec pp = t0, pm = t0, mp = t0, mm = t0;
            pp(i) += h(i), pp(j) += h(j);
            pm(i) += h(i), pm(j) -= h(j);
            mp(i) -= h(i), mp(j) += h(j);
            mm(i) -= h(i), mm(j) -= h(j);
            H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h(i) * h(j));
        }
    }
    bool clamp = !H.allFinite();
    if (clamp) {
        H = H.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
    const Vec &lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    Vec inv(4);
    for (int i = 0; i < 4; ++i) {
        if (lam(i) > 1e-12 * top && top > 0.0) {
            inv(i) = 1.0 / lam(i);
        } else {
            inv(i) = 0.0;
            clamp = true;
        }
    }
    if (projected != nullptr) {
        *projected = clamp;
    }
    Mat cov = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (cov + cov.transpose());
}

EstimationResult mle_fit(std::span<const double> series, FilterInit init) {
    require(series.size() >= 40, Errc::data, "estimation needs at least 40 observations");
    for (std::size_t t = 0; t < series.size(); ++t) {
        require(std::isfinite(series[t]), Errc::data,
                "non-finite observation at index " + std::to_string(t));
    }
    const double n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double var = 0.0;
    for (double y : series) {
        var += (y - mean) * (y - mean);
    }
    var = std::max(var / n, 1e-12);

    auto objective = [&](const Vec &u) { return safe_negloglik(decode(u), series, init); };

    EstimationResult out;
    double best_value = kInf;
    Vec best_u;
    for (double rho : {0.2, 0.5, 0.8, 0.95}) {
        for (double share : {0.3, 0.7}) {
            Ar1Params start;
            start.mean_level = mean;
            start.rho = rho;
            start.obs_sd = std::max(std::sqrt(share * var), 2.0 * kScaleFloor);
            start.innov_sd = std::max(std::sqrt((1.0 - share) * var * (1.0 - rho * rho)),
                                      2.0 * kScaleFloor);
            const Vec u0 = encode(start);
            out.start_logliks.push_back(-objective(u0));
            auto run = nelder_mead(objective, u0);
            // One restart from the optimum guards against a collapsed simplex.
            const auto again = nelder_mead(objective, run.x);
            const bool converged = run.converged || again.converged;
            if (again.value <= run.value) {
                run = again;
            }
            if (!converged || !std::isfinite(run.value)) {
                continue;
            }
            ++out.starts_converged;
            if (run.value < best_value) {
                best_value = run.value;
                best_u = run.x;
            }
        }
    }
    require(out.starts_converged > 0, Errc::estimation, "no start converged");
    out.theta_hat = decode(best_u);
    out.loglik = -best_value;
    const auto &th = out.theta_hat;
    out.boundary = th.obs_sd <= 10.0 * kScaleFloor || th.innov_sd <= 10.0 * kScaleFloor ||
                   th.rho < 1e-4 || th.rho > 1.0 - 1e-4;
    out.covariance = hessian_covariance(th, series, init, &out.covariance_projected);
    out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

SdfCalibration calibrate_sdf(std::span<const double> filtered_states,
                             std::span<const double> riskfree_log) {
    require(filtered_states.size() == riskfree_log.size(), Errc::dimension,
            "state and risk-free series differ in length");
    require(filtered_states.size() >= 8, Errc::data, "calibration needs at least 8 observations");
    const double n = static_cast<double>(filtered_states.size());
    double xbar = 0.0;
    double ybar = 0.0;
    for (std::size_t t = 0; t < filtered_states.size(); ++t) {
        require(std::isfinite(filtered_states[t]) && std::isfinite(riskfree_log[t]), Errc::data,
                "non-finite calibration input at index " + std::to_string(t));
        xbar += filtered_states[t];
        ybar -= riskfree_log[t];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t < filtered_states.size(); ++t) {
        const double dx = filtered_states[t] - xbar;
        sxx += dx * dx;
        sxy += dx * (-riskfree_log[t] - ybar);
    }
    require(sxx / n > 1e-24 * (1.0 + xbar * xbar), Errc::regression,
            "filtered states have zero variance");
    return {ybar, sxy / sxx};
}

Mat pseudo_inverse(const Mat &cov) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
    const Vec &lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    Vec inv = Vec::Zero(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (top > 0.0 && lam(i) > 1e-12 * top) {
            inv(i) = 1.0 / lam(i);
        }
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double kl_divergence(const Vec &x, const Vec &mean, const Mat &cov_pinv) {
    const Vec d = x - mean;
    return 0.5 * d.dot(cov_pinv * d);
}

namespace {

Mat sampling_factor(const Mat &cov) {
    if (cov.isZero(0.0)) {
        return Mat::Zero(cov.rows(), cov.cols());
    }
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() == Eigen::Success) {
        return llt.matrixL();
    }
    const Mat jittered = cov + 1e-12 * Mat::Identity(cov.rows(), cov.cols());
    Eigen::LLT<Mat> llt2(jittered);
    if (llt2.info() == Eigen::Success) {
        return llt2.matrixL();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vec draw_at(const Vec &mean, const Mat &factor, std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal;
    Vec z(mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        z(k) = normal(gen);
    }
    return mean + factor * z;
}

bool admissible(const Vec &t) { return t(3) > 0.0 && t(3) < 1.0 && t(1) > 0.0 && t(2) > 0.0; }

} // namespace

std::vector<Vec> gaussian_draws(const Vec &mean, const Mat &cov, int count, std::uint64_t seed) {
    require(count > 0, Errc::invalid_parameter, "count must be positive");
    require(cov.rows() == mean.size() && cov.cols() == mean.size(), Errc::dimension,
            "covariance does not match the mean");
    const Mat factor = sampling_factor(cov);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(draw_at(mean, factor, seed, static_cast<std::uint64_t>(i)));
    }
    return out;
}

ModelEnsemble sample_ensemble(const EstimationResult &result, int count, std::uint64_t seed,
                              int jobs) {
    require(count > 0, Errc::invalid_parameter, "ensemble count must be positive");
    const Mat &cov = result.covariance;
    require(cov.rows() == 4 && cov.cols() == 4 && cov.allFinite(), Errc::dimension,
            "covariance must be a finite 4x4 matrix");
    const Mat sym = 0.5 * (cov + cov.transpose());
    require((cov - sym).cwiseAbs().maxCoeff() <= 1e-10, Errc::invalid_parameter,
            "covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10, Errc::invalid_parameter,
            "covariance must be positive semidefinite");

    const Vec mean = to_vector(result.theta_hat);
    const Mat factor = sampling_factor(sym);
    const Mat pinv = pseudo_inverse(sym);
    jobs = std::max(1, jobs);

    constexpr std::uint64_t kChunk = 4096;
    constexpr std::uint64_t kMinAttempts = 1000000;
    ModelEnsemble ens;
    std::vector<double> kl;
    std::vector<Vec> chunk(kChunk);
    std::uint64_t next = 0;
    while (ens.draws.size() < static_cast<std::size_t>(count)) {
        auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                chunk[i] = draw_at(mean, factor, seed, next + i);
            }
        };
        if (jobs == 1) {
            fill(0, kChunk);
        } else {
            std::vector<std::thread> pool;
            const std::uint64_t per = (kChunk + static_cast<std::uint64_t>(jobs) - 1) /
                                      static_cast<std::uint64_t>(jobs);
            for (std::uint64_t lo = 0; lo < kChunk; lo += per) {
                pool.emplace_back(fill, lo, std::min(kChunk, lo + per));
            }
            for (auto &t : pool) {
                t.join();
            }
        }
        for (std::uint64_t i = 0; i < kChunk && ens.draws.size() < static_cast<std::size_t>(count);
             ++i) {
            ++ens.attempts;
            if (!admissible(chunk[i])) {
                continue;
            }
            ens.draws.push_back(from_vector(chunk[i]));
            kl.push_back(kl_divergence(chunk[i], mean, pinv));
        }
        next += kChunk;
        if (ens.attempts >= kMinAttempts &&
            static_cast<double>(ens.draws.size()) < 0.01 * static_cast<double>(ens.attempts)) {
            fail(Errc::infeasible, "acceptance rate below 1% after " +
                                       std::to_string(ens.attempts) + " attempts");
        }
    }
    ens.kl_divergences = Eigen::Map<Vec>(kl.data(), static_cast<Eigen::Index>(kl.size()));
    return ens;
}

Vec ensemble_weights(const Vec &kl, WeightRule rule) {
    require(kl.size() > 0, Errc::invalid_parameter, "empty ensemble");
    const auto n = static_cast<double>(kl.size());
    switch (rule) {
    case WeightRule::uniform:
        return Vec::Constant(kl.size(), 1.0 / n);
    case WeightRule::kl: {
        const double total = kl.sum();
        require(total > 0.0, Errc::zero_divergence, "all divergences are zero");
        return kl / total;
    }
    case WeightRule::inverse_kl: {
        require(kl.minCoeff() > 0.0, Errc::zero_divergence,
                "inverse weighting needs strictly positive divergences");
        const Vec inv = kl.cwiseInverse();
        return inv / inv.sum();
    }
    }
    fail(Errc::internal, "unknown weight rule");
}

ModelEnsemble draw_ensemble(const EstimationResult &result, int count, std::uint64_t seed,
                            WeightRule rule, int jobs) {
    auto ens = sample_ensemble(result, count, seed, jobs);
    ens.weights = ensemble_weights(ens.kl_divergences, rule);
    return ens;
}

std::vector<double> simulate_dividend_growth(const Ar1Params &params, int length,
                                             std::uint64_t seed) {
    require(length > 0, Errc::invalid_parameter, "length must be positive");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const double sd = std::abs(params.rho) < 1.0
                          ? params.innov_sd / std::sqrt(1.0 - params.rho * params.rho)
                          : 0.0;
    double x = sd * normal(gen);
    std::vector<double> out(static_cast<std::size_t>(length));
    for (auto &y : out) {
        x = params.rho * x + params.innov_sd * normal(gen);
        y = params.mean_level + x + params.obs_sd * normal(gen);
    }
    return out;
}

} // namespace qdap

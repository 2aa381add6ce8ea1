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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "qdap/estimation.hpp"

using namespace qdap;

namespace {

const Ar1Params kTable{0.01037, 0.64079, 0.01520, 0.03630};

// tests/oracles/kalman.py
const std::vector<double> kShort{0.012,  -0.004, 0.031, 0.020, -0.015, 0.007,
                                 0.044,  0.002,  -0.021, 0.018, 0.009, 0.027};

EstimationResult point(const Mat &cov) {
    EstimationResult r;
    r.theta_hat = kTable;
    r.covariance = cov;
    return r;
}

} // namespace

TEST_CASE("filter log-likelihood matches the dense Gaussian density") {
    CHECK(std::abs(kalman_loglik(kTable, kShort, FilterInit::zero) - 26.104085819331395) < 1e-10);
    CHECK(std::abs(kalman_loglik(kTable, kShort, FilterInit::stationary) - 26.036915030999165) <
          1e-10);
}

TEST_CASE("filter input errors") {
    CHECK_ERRC(kalman_filter(kTable, std::vector<double>(5, 0.01)), Errc::data);
    std::vector<double> with_nan = kShort;
    with_nan[4] = std::nan("");
    CHECK_ERRC(kalman_filter(kTable, with_nan), Errc::data);
    CHECK_ERRC(kalman_filter({0.0, 0.5, 0.0, 0.0}, kShort), Errc::degenerate);
    CHECK_ERRC(kalman_filter({0.0, 1.0, 0.01, 0.01}, kShort), Errc::domain);
}

TEST_CASE("filtered state tracks the latent process") {
    const auto y = simulate_dividend_growth({0.0, 0.9, 0.05, 0.01}, 400, 3);
    const auto f = kalman_filter({0.0, 0.9, 0.05, 0.01}, y);
    // With small observation noise the filtered state is close to y - a.
    double err = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        err = std::max(err, std::abs(f.filtered(Eigen::Index(t)) - y[t]));
    }
    CHECK(err < 0.02);
}

TEST_CASE("parameter vector order") {
    const Vec v = to_vector(kTable);
    CHECK(v(0) == kTable.mean_level);
    CHECK(v(1) == kTable.obs_sd);
    CHECK(v(2) == kTable.innov_sd);
    CHECK(v(3) == kTable.rho);
    const auto back = from_vector(v);
    CHECK(back.rho == kTable.rho);
    CHECK(back.obs_sd == kTable.obs_sd);
}

TEST_CASE("Nelder-Mead minimizes the Rosenbrock valley") {
    const auto f = [](const Vec &x) {
        return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    NelderMeadOptions opt;
    opt.f_tolerance = 1e-14;
    opt.x_tolerance = 1e-10;
    const auto r = nelder_mead(f, (Vec(2) << -1.2, 1.0).finished(), opt);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
    const auto inf = nelder_mead([](const Vec &x) { return x(0) < 0 ? NAN : x(0) * x(0); },
                                 (Vec(1) << 1.0).finished());
    CHECK(std::abs(inf.x(0)) < 1e-3);
}

TEST_CASE("maximum likelihood recovers simulated parameters") {
    const auto y = simulate_dividend_growth(kTable, 2000, 11);
    const auto est = mle_fit(y);
    const Vec truth = to_vector(kTable);
    const Vec hat = to_vector(est.theta_hat);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(hat(i) - truth(i)) <= 3.0 * est.standard_errors(i));
        CHECK(est.standard_errors(i) > 0.0);
    }
    CHECK(est.starts_converged >= 1);
    CHECK(est.loglik >= kalman_loglik(kTable, y) - 1e-9);
    CHECK((est.covariance - est.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_ERRC(mle_fit(std::vector<double>(y.begin(), y.begin() + 30)), Errc::data);
}

TEST_CASE("SDF calibration") {
    std::vector<double> x, r;
    for (int t = 0; t < 50; ++t) {
        x.push_back(0.01 * std::sin(0.3 * t));
        r.push_back(-(0.2 + 1.5 * x.back()));
    }
    const auto c = calibrate_sdf(x, r);
    double xbar = 0.0;
    for (double v : x) {
        xbar += v / 50.0;
    }
    CHECK(c.alpha1 == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(c.alpha0 == doctest::Approx(0.2 + 1.5 * xbar).epsilon(1e-12));
    CHECK_ERRC(calibrate_sdf(std::vector<double>(50, 0.3), r), Errc::regression);
    CHECK_ERRC(calibrate_sdf(x, std::vector<double>(49, 0.0)), Errc::dimension);
}

TEST_CASE("divergence of identity-covariance draws is half a chi-square(4)") {
    const Vec mean = Vec::Zero(4);
    const Mat eye = Mat::Identity(4, 4);
    const auto draws = gaussian_draws(mean, eye, 20000, 5);
    const Mat pinv = pseudo_inverse(eye);
    double s = 0.0;
    for (const auto &x : draws) {
        s += kl_divergence(x, mean, pinv);
    }
    CHECK(s / 20000.0 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("pseudo-inverse handles rank deficiency") {
    Mat cov = Mat::Zero(4, 4);
    cov.diagonal() << 4.0, 1.0, 0.0, 0.0;
    const Mat p = pseudo_inverse(cov);
    CHECK(p(0, 0) == doctest::Approx(0.25));
    CHECK(p(2, 2) == 0.0);
    CHECK((cov * p * cov - cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ensemble draws respect the model constraints") {
    Mat cov = Mat::Zero(4, 4);
    cov.diagonal() << 0.00416 * 0.00416, 0.00272 * 0.00272, 0.00901 * 0.00901, 0.25901 * 0.25901;
    const auto ens = draw_ensemble(point(cov), 500, 42);
    REQUIRE(ens.draws.size() == 500);
    for (const auto &d : ens.draws) {
        CHECK(d.rho > 0.0);
        CHECK(d.rho < 1.0);
        CHECK(d.obs_sd > 0.0);
        CHECK(d.innov_sd > 0.0);
    }
    CHECK(ens.attempts > 500u);
    CHECK(ens.weights.sum() == doctest::Approx(1.0));
    CHECK(ens.weights.minCoeff() >= 0.0);
}

TEST_CASE("ensemble is identical across thread counts") {
    const Mat cov = 1e-4 * Mat::Identity(4, 4);
    const auto a = sample_ensemble(point(cov), 300, 9, 1);
    const auto b = sample_ensemble(point(cov), 300, 9, 4);
    REQUIRE(a.draws.size() == b.draws.size());
    for (std::size_t i = 0; i < a.draws.size(); ++i) {
        CHECK(a.draws[i].rho == b.draws[i].rho);
        CHECK(a.draws[i].mean_level == b.draws[i].mean_level);
    }
    CHECK(a.attempts == b.attempts);
    const auto c = sample_ensemble(point(cov), 300, 10, 1);
    CHECK(c.draws[0].rho != a.draws[0].rho);
}

TEST_CASE("degenerate covariances") {
    const auto fixed = sample_ensemble(point(Mat::Zero(4, 4)), 20, 1);
    for (const auto &d : fixed.draws) {
        CHECK(d.rho == kTable.rho);
    }
    CHECK(fixed.kl_divergences.cwiseAbs().maxCoeff() == 0.0);
    CHECK_ERRC(ensemble_weights(fixed.kl_divergences, WeightRule::kl), Errc::zero_divergence);
    CHECK(ensemble_weights(fixed.kl_divergences, WeightRule::uniform)(3) ==
          doctest::Approx(0.05));
    Mat infeasible = Mat::Zero(4, 4);
    EstimationResult far = point(infeasible);
    far.theta_hat.rho = 5.0;
    far.covariance(3, 3) = 1e-6;
    CHECK_ERRC(sample_ensemble(far, 10, 1), Errc::infeasible);
    Mat indefinite = Mat::Identity(4, 4);
    indefinite(0, 0) = -1.0;
    CHECK_ERRC(sample_ensemble(point(indefinite), 10, 1), Errc::invalid_parameter);
}

TEST_CASE("weight rules") {
    const Vec kl = (Vec(3) << 1.0, 2.0, 5.0).finished();
    const Vec w = ensemble_weights(kl, WeightRule::kl);
    CHECK(w(2) == doctest::Approx(0.625));
    const Vec inv = ensemble_weights(kl, WeightRule::inverse_kl);
    CHECK(inv(0) == doctest::Approx(1.0 / 1.7));
    CHECK(inv(0) > inv(2));
}

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

#include <Eigen/Eigenvalues>

#include "qdap/models.hpp"

using namespace qdap;

namespace {

const Ar1Params kTable{0.01037, 0.64079, 0.01520, 0.03630};
constexpr double kAlpha0 = -0.8974;
constexpr double kAlpha1 = 1.2038;

DiscreteMarkovChain product_chain(int n, double pi_g = 0.5) {
    return kron_extend(discretize_ar1(kTable, n), (Vec(2) << 1.0, -1.0).finished(),
                       (Vec(2) << pi_g, 1.0 - pi_g).finished());
}

UtilitySpec utility(UtilityKind kind, double gamma) {
    UtilitySpec u;
    u.kind = kind;
    u.gamma = gamma;
    return u;
}

} // namespace

TEST_CASE("CRRA system matches the independent solve") {
    // tests/oracles/ar1_chain.py
    const double expected[] = {0.6666879432516987, 0.6666879432516988, 0.733717844124507,
                               0.7337178441245068, 0.8033590176976917, 0.8033590176976917,
                               0.8864842386845623, 0.8864842386845623};
    const auto chain = product_chain(4);
    const SdfSpec sdf{kAlpha0, kAlpha1, xi_from_utility(utility(UtilityKind::crra, 10), kTable)};
    const auto sys = build_system(chain, kTable, sdf);
    const Vec nu = solve_classical(sys);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(nu(i) - expected[i]) < 1e-12);
    }
}

TEST_CASE("SDF shock loadings") {
    CHECK(xi_from_utility(utility(UtilityKind::crra, 10), kTable) ==
          doctest::Approx(-0.363).epsilon(1e-14));
    const double beta = 0.99;
    const double lr = 0.01520 * beta / (1.0 - beta * 0.64079);
    CHECK(xi_from_utility(utility(UtilityKind::recursive_ies1, 2), kTable) ==
          doctest::Approx(lr - (lr + 0.0363) * 2.0).epsilon(1e-14));
    CHECK(xi_from_utility(utility(UtilityKind::recursive_ies1, 1), kTable) ==
          doctest::Approx(-0.0363).epsilon(1e-13));
    CHECK_ERRC(xi_from_utility(utility(UtilityKind::crra, 0.0), kTable), Errc::invalid_parameter);
}

TEST_CASE("assembled system invariants") {
    const auto chain = product_chain(5, 0.8);
    const auto u = utility(UtilityKind::recursive_ies1, 2);
    const auto sv = SvSpec::make(0.8, 0.3, kTable, u);
    const auto sys = build_system(chain, kTable, {kAlpha0, kAlpha1, 0.0}, sv);
    const Eigen::Index n = sys.size();
    const Mat kernel = sys.H.cwiseProduct(sys.M).cwiseProduct(sys.Pi);
    CHECK((sys.A - (Mat::Identity(n, n) - kernel)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sys.b - kernel.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sys.Bdiag - std::sqrt(double(n)) * sys.b).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sys.Bdiag.asDiagonal() * sys.C - sys.A).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((sys.Pi - chain.transition).cwiseAbs().maxCoeff() == 0.0);
    const Vec nu = solve_classical(sys);
    CHECK((sys.A * nu - sys.b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(nu.minCoeff() > 0.0);
}

TEST_CASE("Gordon growth closed form") {
    for (double kappa : {0.5, 0.9, 0.96}) {
        const Eigen::Index n = 8;
        const auto sys = assemble_system(Mat::Ones(n, n), Mat::Constant(n, n, kappa),
                                         Mat::Constant(n, n, 1.0 / double(n)));
        const Vec nu = solve_classical(sys);
        CHECK((nu.array() - kappa / (1.0 - kappa)).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stochastic volatility regimes") {
    const auto u = utility(UtilityKind::crra, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const double pi = testing::uniform(0.05, 0.95);
        const double g = testing::uniform(0.01, 1.0);
        const auto sv = SvSpec::make(pi, g, kTable, u);
        CHECK(pi * sv.b_g + (1.0 - pi) * sv.b_b == doctest::Approx(kTable.obs_sd).epsilon(1e-13));
        CHECK(sv.xi_g == doctest::Approx(-10.0 * sv.b_g).epsilon(1e-13));
    }
    CHECK_ERRC(SvSpec::make(1.0, 0.3, kTable, u), Errc::invalid_parameter);
    CHECK_ERRC(SvSpec::make(0.8, 0.0, kTable, u), Errc::invalid_parameter);
    CHECK_ERRC(SvSpec::make(0.8, 1.2, kTable, u), Errc::invalid_parameter);
}

TEST_CASE("unit volatility ratio collapses to constant volatility") {
    const auto chain = product_chain(4);
    for (auto kind : {UtilityKind::crra, UtilityKind::recursive_ies1}) {
        const auto u = utility(kind, 5);
        const SdfSpec sdf{kAlpha0, kAlpha1, xi_from_utility(u, kTable)};
        const auto flat = build_system(chain, kTable, sdf);
        const auto sv = build_system(chain, kTable, sdf, SvSpec::make(0.5, 1.0, kTable, u));
        CHECK((flat.A - sv.A).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((flat.b - sv.b).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("Nystrom extension reproduces the solution at the nodes") {
    const auto chain = product_chain(6);
    const SdfSpec sdf{kAlpha0, kAlpha1, xi_from_utility(utility(UtilityKind::crra, 4), kTable)};
    const auto sys = build_system(chain, kTable, sdf);
    const Vec nu = solve_classical(sys);
    for (Eigen::Index q = 0; q < chain.size(); ++q) {
        const double v =
            nystrom_extend(sys, nu, chain, kTable, sdf, chain.abscissa(q), std::nullopt, q % 2);
        CHECK(v == doctest::Approx(nu(q)).epsilon(1e-12));
    }
    const double mid = nystrom_extend(sys, nu, chain, kTable, sdf, 0.0, std::nullopt, 0);
    CHECK(mid > nu(4));
    CHECK(mid < nu(6));
    CHECK_ERRC(nystrom_extend(sys, nu, chain, kTable, sdf, 0.0, std::nullopt, 2), Errc::index);
}

TEST_CASE("singular systems are reported") {
    Mat A = Mat::Identity(3, 3);
    A.row(2) = A.row(1);
    CHECK_ERRC(solve_dense(A, Vec::Ones(3)), Errc::singular);
    CHECK_ERRC(solve_dense(Mat::Zero(2, 2), Vec::Ones(2)), Errc::singular);
    CHECK_ERRC(solve_dense(Mat::Identity(2, 2), Vec::Ones(3)), Errc::dimension);
    CHECK_ERRC(assemble_system(Mat::Ones(2, 2), Mat::Ones(2, 2), Mat::Zero(2, 2)),
               Errc::degenerate);
}

TEST_CASE("long-run eigenpair") {
    const auto chain = product_chain(4);
    const auto sys = build_system(chain, kTable, {kAlpha0, kAlpha1, -0.363});
    const auto pp = long_run_eigenpair(sys.M, sys.Pi);
    const Mat K = sys.M.cwiseProduct(sys.Pi);
    CHECK((K * pp.phi - pp.rho * pp.phi).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(pp.phi.minCoeff() > 0.0);
    const double radius = Eigen::EigenSolver<Mat>(K, false).eigenvalues().cwiseAbs().maxCoeff();
    CHECK(pp.rho == doctest::Approx(radius).epsilon(1e-10));
}

TEST_CASE("disaster calibration") {
    // tests/oracles/rare_disaster.py
    CHECK(std::abs(compute_h_star(0.0363, 0.66, 4.0) - 0.089962626262626263) < 1e-15);
    const auto spec = RareDisasterSpec::calibrated(11);
    CHECK(spec.h_star == doctest::Approx(0.09).epsilon(0.001 / 0.09));
    CHECK(spec.sigma_h == doctest::Approx(0.1 * spec.h_star));
}

TEST_CASE("instant mean reversion collapses resilience to a geometric sum") {
    auto spec = RareDisasterSpec::calibrated(9);
    spec.phi_h = 50.0;
    const auto sol = solve_rare_disaster(spec);
    const double kappa = sol.discount;
    CHECK(kappa == doctest::Approx(0.96011712188341366).epsilon(1e-15));
    for (Eigen::Index j = 0; j < sol.nu.size(); ++j) {
        const double h = sol.chain.abscissa(j);
        CHECK(sol.nu(j) == doctest::Approx(1.0 + kappa * (1.0 + h) / (1.0 - kappa)).epsilon(1e-10));
    }
    CHECK((sol.A * sol.nu - Vec::Ones(sol.nu.size())).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("resilience at the H* level diverges") {
    const Mat Pi = Mat::Constant(3, 3, 1.0 / 3.0);
    // kappa (1 + H*) = 1.0465 > 1
    CHECK_ERRC(solve_resilience_system(0.96011712188341366, Vec::Constant(3, 0.0899626262626),
                                       Pi),
               Errc::no_solution);
    auto bad = RareDisasterSpec::calibrated(11);
    bad.p_dis = 1.2;
    CHECK_ERRC(solve_rare_disaster(bad), Errc::invalid_parameter);
}

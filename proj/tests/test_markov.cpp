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

#include "qdap/markov.hpp"

using namespace qdap;

namespace {

const Ar1Params kTable{0.01037, 0.64079, 0.01520, 0.03630};

// numpy hermegauss reference (tests/oracles/ar1_chain.py)
const double kAbscissa[] = {-0.04621902696958852, -0.01469012820764358, 0.01469012820764358,
                            0.04621902696958852};
const double kWeights[] = {0.04587585476806843, 0.4541241452319317, 0.4541241452319317,
                           0.04587585476806843};
const double kRow0[] = {5.0495797481388627e-01, 4.8384253632270069e-01, 1.1195882401159584e-02,
                        3.6064622534354629e-06};
const double kRow1[] = {4.8361174845316213e-02, 7.2999758287749772e-01, 2.2052218806904395e-01,
                        1.1190542081421281e-03};

} // namespace

TEST_CASE("four-point chain matches the independent quadrature") {
    const auto c = discretize_ar1(kTable, 4);
    REQUIRE(c.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(c.abscissa(i) == doctest::Approx(kAbscissa[i]).epsilon(1e-13));
        CHECK(c.weights(i) == doctest::Approx(kWeights[i]).epsilon(1e-12));
        CHECK(std::abs(c.transition(0, i) - kRow0[i]) < 1e-13);
        CHECK(std::abs(c.transition(1, i) - kRow1[i]) < 1e-13);
        CHECK(std::abs(c.transition(3, 3 - i) - kRow0[i]) < 1e-13);
        CHECK(std::abs(c.transition(2, 3 - i) - kRow1[i]) < 1e-13);
    }
}

TEST_CASE("Hermite rule integrates low moments exactly") {
    for (int n : {2, 3, 5, 8, 16}) {
        const auto r = gauss_hermite(n);
        CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(r.weights.dot(r.nodes)) < 1e-13);
        CHECK(r.weights.dot(r.nodes.cwiseAbs2()) == doctest::Approx(1.0).epsilon(1e-12));
        if (n >= 3) {
            CHECK(r.weights.dot(r.nodes.array().pow(4).matrix()) ==
                  doctest::Approx(3.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("rows are distributions for random admissible parameters") {
    for (int trial = 0; trial < 200; ++trial) {
        const Ar1Params p{testing::uniform(-0.1, 0.1), testing::uniform(0.0, 0.98),
                          testing::uniform(1e-3, 0.2), testing::uniform(0.0, 0.1)};
        const int n = 2 + trial % 15;
        const auto c = discretize_ar1(p, n);
        CHECK(c.transition.minCoeff() >= 0.0);
        CHECK((c.transition.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        for (int i = 1; i < n; ++i) {
            CHECK(c.abscissa(i) > c.abscissa(i - 1));
        }
        CHECK((c.abscissa + c.abscissa.reverse()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero persistence gives iid rows equal to the weights") {
    const auto c = discretize_ar1({0.0, 0.0, 0.05, 0.0}, 6);
    for (int j = 0; j < 6; ++j) {
        CHECK((c.transition.row(j).transpose() - c.weights).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("invalid AR(1) parameters are rejected") {
    CHECK_ERRC(discretize_ar1({0.0, 1.0, 0.01, 0.0}, 4), Errc::domain);
    CHECK_ERRC(discretize_ar1({0.0, -0.2, 0.01, 0.0}, 4), Errc::domain);
    CHECK_ERRC(discretize_ar1({0.0, 0.5, 0.0, 0.0}, 4), Errc::invalid_parameter);
    CHECK_ERRC(discretize_ar1(kTable, 1), Errc::invalid_parameter);
}

TEST_CASE("Kronecker extension layout") {
    const auto base = discretize_ar1(kTable, 3);
    const Vec v = (Vec(2) << 1.0, -1.0).finished();
    const Vec p = (Vec(2) << 0.7, 0.3).finished();
    const auto ext = kron_extend(base, v, p);
    REQUIRE(ext.size() == 6);
    for (int j = 0; j < 3; ++j) {
        for (int s = 0; s < 2; ++s) {
            CHECK(ext.abscissa(2 * j + s) == base.abscissa(j));
            for (int k = 0; k < 3; ++k) {
                for (int t = 0; t < 2; ++t) {
                    CHECK(ext.transition(2 * j + s, 2 * k + t) ==
                          doctest::Approx(base.transition(j, k) * p(t)).epsilon(1e-15));
                }
            }
        }
    }
    CHECK((ext.base_abscissa() - base.abscissa).cwiseAbs().maxCoeff() == 0.0);
    CHECK_ERRC(kron_extend(ext, v, p), Errc::invalid_parameter);
    CHECK_ERRC(kron_extend(base, v, (Vec(2) << 0.7, 0.4).finished()),
               Errc::invalid_distribution);
}

TEST_CASE("ergodic distribution is stationary") {
    const auto c = discretize_ar1(kTable, 8);
    const Vec w = ergodic_distribution(c);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((c.transition.transpose() * w - w).cwiseAbs().maxCoeff() < 1e-12);
    Mat sticky(2, 2);
    sticky << 1.0 - 1e-6, 1e-6, 0.5, 0.5;
    CHECK_ERRC(ergodic_distribution(sticky, 10), Errc::convergence);
}

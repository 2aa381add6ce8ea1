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
#include "qdap/qsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qdap/error.hpp"

namespace qdap {

namespace {

constexpr double kPi = std::numbers::pi;

void check_unitary(const CMat &U) {
    require(U.rows() == U.cols() && U.rows() > 0, Errc::dimension, "gate must be square");
    const double err =
        (U.adjoint() * U - CMat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
    require(err <= 1e-10, Errc::unitarity,
            "gate is not unitary (deviation " + std::to_string(err) + ")");
}

Eigen::Index pow2(int n) { return Eigen::Index{1} << n; }

} // namespace

int qubits_for(Eigen::Index dim) {
    int n = 1;
    while (pow2(n) < dim) {
        ++n;
    }
    return n;
}

QuantumState prepare_state(const CVec &v) {
    require(v.size() > 0, Errc::degenerate, "cannot prepare an empty vector");
    require(v.allFinite(), Errc::invalid_parameter, "state vector must be finite");
    const double norm = v.norm();
    require(norm > 0.0, Errc::degenerate, "cannot prepare the zero vector");
    QuantumState s;
    s.n_qubits = qubits_for(v.size());
    s.logical_dim = v.size();
    s.amplitudes = CVec::Zero(pow2(s.n_qubits));
    s.amplitudes.head(v.size()) = v / norm;
    return s;
}

QuantumState prepare_state(const Vec &v) { return prepare_state(CVec(v.cast<cplx>())); }

QuantumState basis_state(int n_qubits, Eigen::Index index) {
    require(n_qubits >= 1 && n_qubits < 31, Errc::invalid_parameter, "qubit count out of range");
    require(index >= 0 && index < pow2(n_qubits), Errc::index, "basis index out of range");
    QuantumState s;
    s.n_qubits = n_qubits;
    s.logical_dim = pow2(n_qubits);
    s.amplitudes = CVec::Zero(pow2(n_qubits));
    s.amplitudes(index) = 1.0;
    return s;
}

void apply_gate(QuantumState &state, const CMat &U, std::span<const int> targets,
                std::span<const int> controls, std::span<const int> control_values) {
    const int n = state.n_qubits;
    const auto k = static_cast<int>(targets.size());
    require(k >= 1, Errc::index, "gate needs at least one target");
    require(U.rows() == pow2(k), Errc::dimension, "gate size does not match target count");
    require(control_values.empty() || control_values.size() == controls.size(), Errc::dimension,
            "control values do not match controls");
    check_unitary(U);

    Eigen::Index target_mask = 0;
    for (int q : targets) {
        require(q >= 0 && q < n, Errc::index, "target qubit out of range");
        require(!(target_mask & pow2(q)), Errc::index, "duplicate target qubit");
        target_mask |= pow2(q);
    }
    Eigen::Index control_mask = 0;
    Eigen::Index control_match = 0;
    for (std::size_t c = 0; c < controls.size(); ++c) {
        const int q = controls[c];
        require(q >= 0 && q < n, Errc::index, "control qubit out of range");
        require(!((target_mask | control_mask) & pow2(q)), Errc::index,
                "control overlaps another qubit");
        control_mask |= pow2(q);
        const int want = control_values.empty() ? 1 : control_values[c];
        if (want) {
            control_match |= pow2(q);
        }
    }

    const Eigen::Index block = pow2(k);
    std::vector<Eigen::Index> offsets(static_cast<std::size_t>(block), 0);
    for (Eigen::Index m = 0; m < block; ++m) {
        for (int j = 0; j < k; ++j) {
            if (m & pow2(j)) {
                offsets[static_cast<std::size_t>(m)] |= pow2(targets[static_cast<std::size_t>(j)]);
            }
        }
    }
    CVec in(block);
    CVec out(block);
    const Eigen::Index dim = state.amplitudes.size();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if ((base & target_mask) || (base & control_mask) != control_match) {
            continue;
        }
        for (Eigen::Index m = 0; m < block; ++m) {
            in(m) = state.amplitudes(base | offsets[static_cast<std::size_t>(m)]);
        }
        out.noalias() = U * in;
        for (Eigen::Index m = 0; m < block; ++m) {
            state.amplitudes(base | offsets[static_cast<std::size_t>(m)]) = out(m);
        }
    }
}

QuantumState apply_unitary(const QuantumState &state, const CMat &U,
                           std::span<const int> targets) {
    QuantumState out = state;
    apply_gate(out, U, targets);
    return out;
}

namespace gates {

CMat hadamard() {
    CMat h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    return h;
}

CMat pauli_x() {
    CMat x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

CMat phase(double theta) {
    CMat p = CMat::Identity(2, 2);
    p(1, 1) = std::polar(1.0, theta);
    return p;
}

CMat ry(double theta) {
    CMat r(2, 2);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    r << c, -s, s, c;
    return r;
}

CMat swap() {
    CMat s = CMat::Zero(4, 4);
    s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
    return s;
}

} // namespace gates

void qft_inplace(QuantumState &state, int first, int count, bool inverse) {
    require(count >= 1 && first >= 0 && first + count <= state.n_qubits, Errc::index,
            "QFT register out of range");
    const CMat h = gates::hadamard();
    const CMat sw = gates::swap();
    auto q = [first](int j) { return first + j; };
    auto swaps = [&] {
        for (int i = 0; i < count / 2; ++i) {
            const int t[2] = {q(i), q(count - 1 - i)};
            apply_gate(state, sw, t);
        }
    };
    if (!inverse) {
        for (int j = count - 1; j >= 0; --j) {
            const int t[1] = {q(j)};
            apply_gate(state, h, t);
            for (int l = j - 1; l >= 0; --l) {
                const int c[1] = {q(l)};
                apply_gate(state, gates::phase(kPi / static_cast<double>(pow2(j - l))), t, c);
            }
        }
        swaps();
    } else {
        swaps();
        for (int j = 0; j < count; ++j) {
            const int t[1] = {q(j)};
            for (int l = 0; l < j; ++l) {
                const int c[1] = {q(l)};
                apply_gate(state, gates::phase(-kPi / static_cast<double>(pow2(j - l))), t, c);
            }
            apply_gate(state, h, t);
        }
    }
}

QuantumState qft(const QuantumState &state, int first, int count) {
    QuantumState out = state;
    qft_inplace(out, first, count, false);
    return out;
}

QuantumState inverse_qft(const QuantumState &state, int first, int count) {
    QuantumState out = state;
    qft_inplace(out, first, count, true);
    return out;
}

double fidelity(const QuantumState &a, const QuantumState &b) {
    require(a.dim() == b.dim(), Errc::dimension, "states differ in register size");
    const double f = std::norm(a.amplitudes.dot(b.amplitudes));
    return std::clamp(f, 0.0, 1.0);
}

HermitianSystem hermitian_embed(const Mat &A, const Vec &b) {
    require(A.rows() >= 1 && A.rows() == A.cols() && b.size() == A.rows(), Errc::dimension,
            "embedding needs a square matrix and matching right-hand side");
    require(A.allFinite() && b.allFinite(), Errc::invalid_parameter,
            "embedding inputs must be finite");
    const Eigen::Index n = A.rows();
    HermitianSystem sys;
    sys.original_dim = n;
    sys.matrix = Mat::Zero(2 * n, 2 * n);
    sys.matrix.topRightCorner(n, n) = A;
    sys.matrix.bottomLeftCorner(n, n) = A.transpose();
    sys.rhs = Vec::Zero(2 * n);
    sys.rhs.head(n) = b;
    return sys;
}

Vec embedded_solution(const Vec &x) {
    Vec out = Vec::Zero(2 * x.size());
    out.tail(x.size()) = x;
    return out;
}

QuantumState ideal_hhl(const HermitianSystem &sys) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sys.matrix);
    const Vec &lambda = es.eigenvalues();
    const double lmax = lambda.cwiseAbs().maxCoeff();
    const double lmin = lambda.cwiseAbs().minCoeff();
    require(lmin >= 1e-12 * lmax && lmax > 0.0, Errc::ill_conditioned,
            "embedded matrix is ill-conditioned");
    const double bnorm = sys.rhs.norm();
    require(bnorm > 0.0, Errc::degenerate, "right-hand side is zero");
    const Vec beta = es.eigenvectors().transpose() * (sys.rhs / bnorm);
    const Vec x = es.eigenvectors() * beta.cwiseQuotient(lambda);
    return prepare_state(x);
}

double default_evolution_time(double lambda_max, int clock_qubits) {
    require(lambda_max > 0.0, Errc::invalid_parameter, "spectral bound must be positive");
    const double top = std::max(static_cast<double>(pow2(clock_qubits - 1)) - 1.0, 0.5);
    return 2.0 * kPi * top / (static_cast<double>(pow2(clock_qubits)) * lambda_max);
}

HhlResult circuit_hhl(const HermitianSystem &sys, const HhlConfig &cfg) {
    const int m = cfg.clock_qubits;
    require(m >= 1 && m <= 12, Errc::config, "clock_qubits must lie in [1, 12]");
    const Eigen::Index d = sys.matrix.rows();
    require(d >= 1 && sys.rhs.size() == d, Errc::dimension, "system and rhs disagree");
    const double bnorm = sys.rhs.norm();
    require(bnorm > 0.0, Errc::degenerate, "right-hand side is zero");

    Eigen::SelfAdjointEigenSolver<Mat> core(sys.matrix);
    const double lmax = core.eigenvalues().cwiseAbs().maxCoeff();
    const double lmin = core.eigenvalues().cwiseAbs().minCoeff();
    require(lmin >= 1e-12 * lmax && lmax > 0.0, Errc::ill_conditioned,
            "embedded matrix is ill-conditioned");

    const int nb = qubits_for(d);
    const Eigen::Index db = pow2(nb);
    Mat padded = Mat::Identity(db, db);
    padded.topLeftCorner(d, d) = sys.matrix;
    Vec rhs = Vec::Zero(db);
    rhs.head(d) = sys.rhs / bnorm;
    Eigen::SelfAdjointEigenSolver<Mat> es(padded);
    const Vec &lambda = es.eigenvalues();
    const Mat &V = es.eigenvectors();
    const Vec beta = V.transpose() * rhs;

    const Eigen::Index clock_dim = pow2(m);
    const double t = cfg.evolution_time > 0.0 ? cfg.evolution_time : default_evolution_time(lmax, m);
    for (Eigen::Index i = 0; i < db; ++i) {
        if (std::abs(beta(i)) <= 1e-12) {
            continue;
        }
        const double ph = lambda(i) * t / (2.0 * kPi);
        require(std::abs(ph) < 0.5, Errc::phase_aliasing,
                "eigenphase " + std::to_string(ph) +
                    " leaves the signed clock window; reduce evolution_time");
    }
    const double bin = 2.0 * kPi / (static_cast<double>(clock_dim) * t);
    double C = cfg.rotation_constant;
    if (C > 0.0) {
        require(C <= bin * (1.0 + 1e-12), Errc::config,
                "rotation_constant exceeds the smallest clock eigenvalue bin");
    } else {
        C = std::min(0.9 * lmin, bin);
    }

    const int n_total = nb + m + 1;
    require(n_total <= 26, Errc::config, "register too large for the statevector engine");
    QuantumState st;
    st.n_qubits = n_total;
    st.logical_dim = d;
    st.amplitudes = CVec::Zero(pow2(n_total));
    st.amplitudes.head(db) = rhs.cast<cplx>();

    std::vector<int> sol(static_cast<std::size_t>(nb));
    for (int q = 0; q < nb; ++q) {
        sol[static_cast<std::size_t>(q)] = q;
    }
    const int clock0 = nb;
    const int anc = nb + m;
    const CMat h = gates::hadamard();
    auto evolution = [&](double scale) {
        CVec phases(db);
        for (Eigen::Index i = 0; i < db; ++i) {
            phases(i) = std::polar(1.0, lambda(i) * t * scale);
        }
        return CMat(V.cast<cplx>() * phases.asDiagonal() * V.transpose().cast<cplx>());
    };

    // Phase estimation.
    for (int j = 0; j < m; ++j) {
        const int q[1] = {clock0 + j};
        apply_gate(st, h, q);
    }
    for (int j = 0; j < m; ++j) {
        const int c[1] = {clock0 + j};
        apply_gate(st, evolution(static_cast<double>(pow2(j))), sol, c);
    }
    qft_inplace(st, clock0, m, true);

    // Eigenvalue inversion on the ancilla, signed two's-complement decoding.
    std::vector<int> clock_qubits(static_cast<std::size_t>(m));
    std::vector<int> bits(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        clock_qubits[static_cast<std::size_t>(j)] = clock0 + j;
    }
    const int anc_t[1] = {anc};
    for (Eigen::Index y = 1; y < clock_dim; ++y) {
        const Eigen::Index sy = y >= clock_dim / 2 ? y - clock_dim : y;
        const double lt = 2.0 * kPi * static_cast<double>(sy) / (static_cast<double>(clock_dim) * t);
        const double ratio = std::clamp(C / lt, -1.0, 1.0);
        for (int j = 0; j < m; ++j) {
            bits[static_cast<std::size_t>(j)] = static_cast<int>((y >> j) & 1);
        }
        apply_gate(st, gates::ry(2.0 * std::asin(ratio)), anc_t, clock_qubits, bits);
    }

    // Uncompute.
    qft_inplace(st, clock0, m, false);
    for (int j = m - 1; j >= 0; --j) {
        const int c[1] = {clock0 + j};
        apply_gate(st, evolution(-static_cast<double>(pow2(j))), sol, c);
    }
    for (int j = 0; j < m; ++j) {
        const int q[1] = {clock0 + j};
        apply_gate(st, h, q);
    }

    HhlResult res;
    res.evolution_time = t;
    res.rotation_constant = C;
    const Eigen::Index anc_bit = pow2(anc);
    double p_anc = 0.0;
    for (Eigen::Index i = 0; i < st.amplitudes.size(); ++i) {
        if (i & anc_bit) {
            p_anc += std::norm(st.amplitudes(i));
        }
    }
    res.success_probability = p_anc;
    const CVec kept = st.amplitudes.segment(anc_bit, db);
    const double p_kept = kept.squaredNorm();
    require(p_kept >= 1e-12, Errc::post_selection, "post-selection probability below 1e-12");
    res.solution.n_qubits = nb;
    res.solution.logical_dim = d;
    res.solution.amplitudes = kept / std::sqrt(p_kept);

    if (cfg.shots) {
        require(*cfg.shots > 0, Errc::config, "shots must be positive");
        std::mt19937_64 rng(cfg.seed);
        std::binomial_distribution<long long> draw(*cfg.shots, std::clamp(p_anc, 0.0, 1.0));
        res.sampled_success = static_cast<double>(draw(rng)) / static_cast<double>(*cfg.shots);
    }
    return res;
}

int sparsity(const Mat &A, double threshold) {
    int best = 0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        best = std::max(best, static_cast<int>((A.row(i).array().abs() > threshold).count()));
    }
    return best;
}

double condition_number(const Mat &A) {
    require(A.size() > 0, Errc::dimension, "empty matrix");
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec &s = svd.singularValues();
    require(s(0) > 0.0, Errc::singular, "matrix is zero");
    const double smin = s(s.size() - 1);
    require(smin > 0.0, Errc::singular, "smallest singular value is zero");
    return s(0) / smin;
}

} // namespace qdap

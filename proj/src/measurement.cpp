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
#include "qdap/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qdap/error.hpp"

namespace qdap {

namespace {

constexpr double kPi = std::numbers::pi;

void check_observations(const std::vector<double> &obs, int n_points, double &lo, double &hi) {
    require(n_points >= 2, Errc::invalid_parameter, "data grid needs at least two points");
    require(obs.size() >= 2, Errc::data, "need at least two observations");
    for (double v : obs) {
        require(std::isfinite(v), Errc::data, "non-finite observation");
    }
    const auto [mn, mx] = std::minmax_element(obs.begin(), obs.end());
    lo = *mn;
    hi = *mx;
    require(hi > lo, Errc::data, "observations have zero range");
    require(lo > 0.0, Errc::data, "price-dividend observations must be positive");
}

double hermitian_residue(const CMat &m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const CMat &m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

DataState data_state(const std::vector<double> &observations, int n_points) {
    double lo = 0.0;
    double hi = 0.0;
    check_observations(observations, n_points, lo, hi);
    DataState d;
    d.grid = Vec::LinSpaced(n_points, lo, hi);
    d.source_min = lo;
    d.source_max = hi;
    d.state = prepare_state(d.grid);
    return d;
}

DataState data_state_cdf(const std::vector<double> &observations, int n_points) {
    double lo = 0.0;
    double hi = 0.0;
    check_observations(observations, n_points, lo, hi);
    DataState d;
    d.grid = Vec::LinSpaced(n_points, lo, hi);
    d.source_min = lo;
    d.source_max = hi;
    std::vector<double> sorted = observations;
    std::sort(sorted.begin(), sorted.end());
    Vec cdf(n_points);
    for (int i = 0; i < n_points; ++i) {
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), d.grid(i)) - sorted.begin();
        cdf(i) = static_cast<double>(below) / static_cast<double>(sorted.size());
    }
    // The top grid point is the sample maximum.
    cdf(n_points - 1) = 1.0;
    d.state = prepare_state(cdf);
    return d;
}

PricingErrorState pricing_error_state(const DataState &d, const Vec &nu) {
    const Eigen::Index n = d.state.logical_dim;
    require(nu.size() == n, Errc::dimension,
            "model solution has " + std::to_string(nu.size()) + " states, data grid has " +
                std::to_string(n));
    require(nu.allFinite(), Errc::invalid_parameter, "model solution must be finite");
    Vec sorted = nu;
    std::sort(sorted.begin(), sorted.end());
    const double norm = sorted.norm();
    require(norm > 0.0, Errc::degenerate, "model solution is zero");
    CVec diff = d.state.amplitudes.head(n) - (sorted / norm).cast<cplx>();
    PricingErrorState e;
    e.raw_norm = diff.norm();
    require(e.raw_norm > 1e-14, Errc::perfect_fit, "model reproduces the data state exactly");
    e.state = prepare_state(diff);
    return e;
}

void MeasurementOperator::validate() const {
    require(matrix.rows() == matrix.cols() && matrix.rows() > 0, Errc::dimension,
            "operator must be square");
    const Eigen::Index n = matrix.rows();
    if (kind == OperatorKind::phase_unitary) {
        const double err = (matrix.adjoint() * matrix - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
        require(err <= 1e-10, Errc::unitarity, "phase operator is not unitary");
        return;
    }
    require(hermitian_residue(matrix) <= 1e-10, Errc::integrity, "operator is not Hermitian");
    switch (kind) {
    case OperatorKind::projector: {
        const double err = (matrix * matrix - matrix).cwiseAbs().maxCoeff();
        require(err <= 1e-10, Errc::integrity, "projector is not idempotent");
        break;
    }
    case OperatorKind::density_mixture:
        require(std::abs(matrix.trace().real() - 1.0) <= 1e-10, Errc::integrity,
                "density operator trace differs from one");
        [[fallthrough]];
    case OperatorKind::mixture:
    case OperatorKind::ambiguity_projector:
        require(min_eigenvalue(matrix) >= -1e-10, Errc::integrity, "operator is not PSD");
        break;
    default:
        break;
    }
}

MeasurementOperator projector(const CVec &v) {
    const double norm = v.norm();
    require(norm > 0.0, Errc::degenerate, "cannot project onto the zero vector");
    const CVec u = v / norm;
    return {u * u.adjoint(), OperatorKind::projector};
}

MeasurementOperator projector(const QuantumState &state) { return projector(state.amplitudes); }

namespace {

cplx finish(const MeasurementOperator &op, cplx value) {
    if (op.kind == OperatorKind::phase_unitary) {
        return value;
    }
    require(std::abs(value.imag()) <= 1e-10, Errc::integrity,
            "Hermitian expectation has imaginary residue " + std::to_string(value.imag()));
    return {value.real(), 0.0};
}

} // namespace

cplx expectation(const MeasurementOperator &op, const QuantumState &target) {
    require(op.matrix.rows() == target.dim(), Errc::dimension,
            "operator and state dimensions differ");
    return finish(op, target.amplitudes.dot(op.matrix * target.amplitudes));
}

cplx expectation(const MeasurementOperator &op, const CMat &rho) {
    require(op.matrix.rows() == rho.rows() && rho.rows() == rho.cols(), Errc::dimension,
            "operator and density dimensions differ");
    return finish(op, (op.matrix * rho).trace());
}

double cvm_loss(const DataState &d, const Vec &nu) {
    const auto e = pricing_error_state(d, nu);
    return std::norm(d.state.amplitudes.dot(e.state.amplitudes));
}

MeasurementOperator mixture_operator(double p, const MeasurementOperator &data_proj,
                                     const MeasurementOperator &bench_proj) {
    require(p >= 0.0 && p <= 1.0, Errc::domain, "mixture weight must lie in [0, 1]");
    require(data_proj.matrix.rows() == bench_proj.matrix.rows(), Errc::dimension,
            "projectors differ in dimension");
    return {(1.0 - p) * data_proj.matrix + p * bench_proj.matrix, OperatorKind::mixture};
}

MeasurementOperator tail_operator(const DataState &d, const std::vector<Eigen::Index> &bad,
                                  TailWeights weights) {
    require(!bad.empty(), Errc::empty_operator, "tail operator needs at least one state");
    const Eigen::Index n = d.state.dim();
    CMat m = CMat::Zero(n, n);
    for (Eigen::Index i : bad) {
        require(i >= 0 && i < d.state.logical_dim, Errc::index, "tail index out of range");
        m(i, i) = weights == TailWeights::unit ? cplx{1.0, 0.0} : d.state.amplitudes(i);
    }
    return {m, OperatorKind::tail};
}

MeasurementOperator phase_operator(double theta, const MeasurementOperator &bench_proj) {
    const Eigen::Index n = bench_proj.matrix.rows();
    return {std::polar(1.0, theta) * bench_proj.matrix + (CMat::Identity(n, n) - bench_proj.matrix),
            OperatorKind::phase_unitary};
}

Superposition superposition_state(double alpha, double delta, const DataState &d,
                                  const QuantumState &benchmark) {
    require(alpha >= 0.0 && alpha <= 1.0, Errc::domain, "alpha must lie in [0, 1]");
    require(d.state.dim() == benchmark.dim(), Errc::dimension,
            "data and benchmark differ in dimension");
    Superposition s;
    s.vector = alpha * d.state.amplitudes +
               std::polar(std::sqrt(1.0 - alpha * alpha), delta) * benchmark.amplitudes;
    s.norm = s.vector.norm();
    return s;
}

AmbiguityDecomposition ambiguity_decomposition(double alpha, double delta, const DataState &d,
                                               const QuantumState &benchmark,
                                               const QuantumState &error_state, bool renormalize) {
    const auto s = superposition_state(alpha, delta, d, benchmark);
    require(error_state.dim() == d.state.dim(), Errc::dimension,
            "error state differs in dimension");
    const cplx ed = error_state.amplitudes.dot(d.state.amplitudes);
    const cplx eb = error_state.amplitudes.dot(benchmark.amplitudes);
    AmbiguityDecomposition out;
    out.r_d = std::abs(ed);
    out.r_b = std::abs(eb);
    out.phase_gap = std::arg(eb) - std::arg(ed);
    const double a2 = alpha * alpha;
    out.classical_part = a2 * out.r_d * out.r_d + (1.0 - a2) * out.r_b * out.r_b;
    out.quantum_part = kInterference * alpha * std::sqrt(1.0 - a2) * out.r_d * out.r_b *
                       std::cos(delta + out.phase_gap);
    if (renormalize) {
        require(s.norm > 0.0, Errc::cancellation, "superposition vanishes");
        const double scale = 1.0 / (s.norm * s.norm);
        out.classical_part *= scale;
        out.quantum_part *= scale;
    }
    out.total = out.classical_part + out.quantum_part;
    return out;
}

MixedState mixed_state(const std::vector<QuantumState> &states, const std::vector<double> &weights,
                       MixMode mode) {
    require(!states.empty() && states.size() == weights.size(), Errc::dimension,
            "states and weights differ in count");
    double total = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, Errc::invalid_distribution,
                "weights must be nonnegative");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-10, Errc::invalid_distribution,
            "weights must sum to one");
    const Eigen::Index n = states.front().dim();
    for (const auto &s : states) {
        require(s.dim() == n, Errc::dimension, "states differ in dimension");
    }
    MixedState out;
    if (mode == MixMode::density) {
        CMat rho = CMat::Zero(n, n);
        for (std::size_t j = 0; j < states.size(); ++j) {
            rho.noalias() += weights[j] * states[j].amplitudes * states[j].amplitudes.adjoint();
        }
        out.density = std::move(rho);
        return out;
    }
    CVec sum = CVec::Zero(n);
    for (std::size_t j = 0; j < states.size(); ++j) {
        sum += weights[j] * states[j].amplitudes;
    }
    require(sum.norm() > 1e-14, Errc::cancellation, "superposed mixture cancels to zero");
    QuantumState q;
    q.n_qubits = states.front().n_qubits;
    q.logical_dim = states.front().logical_dim;
    q.amplitudes = sum / sum.norm();
    out.superposed = std::move(q);
    return out;
}

std::pair<double, double> cos_range(double lo, double hi) {
    require(lo <= hi, Errc::invalid_parameter, "phase range must be ordered");
    if (hi - lo >= 2.0 * kPi) {
        return {-1.0, 1.0};
    }
    auto hits = [&](double offset) {
        const double k = std::ceil((lo - offset) / (2.0 * kPi));
        return offset + 2.0 * kPi * k <= hi;
    };
    const double a = std::cos(lo);
    const double b = std::cos(hi);
    return {hits(kPi) ? -1.0 : std::min(a, b), hits(0.0) ? 1.0 : std::max(a, b)};
}

namespace {

std::vector<double> crossings_of(const Vec &p, const Vec &y, double level) {
    std::vector<double> out;
    const Eigen::Index n = p.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = y(i) - level;
        if (f == 0.0) {
            out.push_back(p(i));
            continue;
        }
        if (i + 1 < n) {
            const double g = y(i + 1) - level;
            if (g != 0.0 && (f < 0.0) != (g < 0.0)) {
                out.push_back(p(i) + (p(i + 1) - p(i)) * f / (f - g));
            }
        }
    }
    return out;
}

} // namespace

AmbiguityScan ambiguity_scan(const PricingErrorState &target, const DataState &d,
                             const QuantumState &benchmark, const ScanOptions &options) {
    require(options.grid_points >= 3, Errc::config, "scan grid needs at least three points");
    require(options.reference_p >= 0.0 && options.reference_p <= 1.0, Errc::domain,
            "reference mixture weight must lie in [0, 1]");
    const QuantumState &e = target.state;
    require(e.dim() == d.state.dim() && benchmark.dim() == d.state.dim(), Errc::dimension,
            "scan states differ in dimension");

    AmbiguityScan scan;
    const cplx ed = e.amplitudes.dot(d.state.amplitudes);
    const cplx eb = e.amplitudes.dot(benchmark.amplitudes);
    scan.r_d = std::abs(ed);
    scan.r_b = std::abs(eb);
    scan.phase_gap = std::arg(eb) - std::arg(ed);
    const double overlap_db = std::norm(d.state.amplitudes.dot(benchmark.amplitudes));
    scan.reference_level = (1.0 - options.reference_p) * overlap_db + options.reference_p;
    scan.delta_range = options.delta_range;

    const auto [cmin, cmax] =
        options.delta_range
            ? cos_range(options.delta_range->first + scan.phase_gap,
                        options.delta_range->second + scan.phase_gap)
            : std::pair<double, double>{-1.0, 1.0};

    const Eigen::Index n = options.grid_points;
    scan.p_grid = Vec::LinSpaced(n, 0.0, 1.0);
    scan.classical_loss.resize(n);
    scan.envelope_low.resize(n);
    scan.envelope_high.resize(n);
    const double rd2 = scan.r_d * scan.r_d;
    const double rb2 = scan.r_b * scan.r_b;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = scan.p_grid(i);
        const double cl = (1.0 - p) * rd2 + p * rb2;
        const double width =
            kInterference * std::sqrt(std::max(p * (1.0 - p), 0.0)) * scan.r_d * scan.r_b;
        scan.classical_loss(i) = cl;
        scan.envelope_low(i) = cl + width * cmin;
        scan.envelope_high(i) = cl + width * cmax;
    }

    const auto classical = crossings_of(scan.p_grid, scan.classical_loss, scan.reference_level);
    std::vector<double> env = crossings_of(scan.p_grid, scan.envelope_low, scan.reference_level);
    const auto high = crossings_of(scan.p_grid, scan.envelope_high, scan.reference_level);
    env.insert(env.end(), high.begin(), high.end());
    std::sort(env.begin(), env.end());

    scan.crossings = env;
    scan.crossings.insert(scan.crossings.end(), classical.begin(), classical.end());
    std::sort(scan.crossings.begin(), scan.crossings.end());
    scan.multiple_crossings = classical.size() > 1 || env.size() > 2;

    scan.p_C_found = !classical.empty();
    scan.p_C = scan.p_C_found ? classical.front() : std::numeric_limits<double>::quiet_NaN();

    std::vector<double> left;
    std::vector<double> right;
    for (double c : env) {
        if (!scan.p_C_found || c <= scan.p_C) {
            left.push_back(c);
        }
        if (!scan.p_C_found || c >= scan.p_C) {
            right.push_back(c);
        }
    }
    scan.p_L_clamped = left.empty();
    scan.p_U_clamped = right.empty();
    scan.p_L = left.empty() ? 0.0 : left.front();
    scan.p_U = right.empty() ? 1.0 : right.back();

    scan.degenerate = fidelity(e, benchmark) >= 1.0 - 1e-12;
    if (scan.degenerate) {
        scan.p_L = 0.0;
        scan.p_U = 1.0;
        scan.p_L_clamped = scan.p_U_clamped = true;
    }
    return scan;
}

} // namespace qdap

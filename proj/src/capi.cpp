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
#include "qdap/qdap.h"

#include <new>
#include <string>

#include <json.hpp>

#include "qdap/app.hpp"
#include "qdap/error.hpp"
#include "qdap/markov.hpp"
#include "qdap/models.hpp"
#include "qdap/qsolver.hpp"

struct qdap_chain {
    qdap::DiscreteMarkovChain chain;
};

struct qdap_system {
    qdap::PricingSystem sys;
};

struct qdap_state {
    qdap::QuantumState state;
};

namespace {

thread_local std::string g_last_error;

int set_error(int status, const std::string &msg) {
    g_last_error = msg;
    return status;
}

class CError : public std::exception {
  public:
    CError(int status, const char *msg) : status_(status), msg_(msg) {}
    int status() const { return status_; }
    const char *what() const noexcept override { return msg_; }

  private:
    int status_;
    const char *msg_;
};

template <typename F> int api(F &&fn) {
    try {
        fn();
        g_last_error.clear();
        return QDAP_OK;
    } catch (const CError &e) {
        return set_error(e.status(), e.what());
    } catch (const qdap::Error &e) {
        return set_error(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(QDAP_E_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return set_error(QDAP_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(QDAP_E_INTERNAL, "unknown error");
    }
}

template <typename... P> void nonnull(const P *...ptrs) {
    if (((ptrs == nullptr) || ...)) {
        throw CError(QDAP_E_NULL_POINTER, "null pointer argument");
    }
}

void fits(size_t need, size_t len) {
    if (len < need) {
        throw CError(QDAP_E_BUFFER_TOO_SMALL, "output buffer is too small");
    }
}

qdap::Ar1Params ar1_from(const qdap_ar1 *p) {
    return {p->mean_level, p->rho, p->innov_sd, p->obs_sd};
}

void copy_out(const qdap::Vec &v, double *buf, size_t len) {
    fits(static_cast<size_t>(v.size()), len);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        buf[i] = v(i);
    }
}

void copy_out(const qdap::Mat &m, double *buf, size_t len) {
    fits(static_cast<size_t>(m.size()), len);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            buf[r * m.cols() + c] = m(r, c);
        }
    }
}

qdap::Mat matrix_in(const double *data, size_t rows, size_t cols) {
    qdap::Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * cols + c];
        }
    }
    return m;
}

} // namespace

extern "C" {

const char *qdap_version(void) { return "1.0.0"; }

const char *qdap_last_error(void) { return g_last_error.c_str(); }

const char *qdap_status_name(int status) {
    switch (status) {
    case QDAP_OK:
        return "ok";
    case QDAP_E_NULL_POINTER:
        return "null_pointer";
    case QDAP_E_BUFFER_TOO_SMALL:
        return "buffer_too_small";
    default:
        return qdap::errc_name(static_cast<qdap::Errc>(status));
    }
}

int qdap_exit_code(int status) {
    if (status == QDAP_OK) {
        return 0;
    }
    if (status == QDAP_E_NULL_POINTER || status == QDAP_E_BUFFER_TOO_SMALL) {
        return 2;
    }
    return qdap::exit_code_for(static_cast<qdap::Errc>(status));
}

int qdap_chain_discretize_ar1(const qdap_ar1 *params, int n_points, qdap_chain **out) {
    return api([&] {
        nonnull(params, out);
        *out = new qdap_chain{qdap::discretize_ar1(ar1_from(params), n_points)};
    });
}

int qdap_chain_kron_extend(const qdap_chain *chain, const double *shock_values,
                           const double *shock_probs, size_t n_shocks, qdap_chain **out) {
    return api([&] {
        nonnull(chain, shock_values, shock_probs, out);
        const auto n = static_cast<Eigen::Index>(n_shocks);
        const qdap::Vec v = Eigen::Map<const qdap::Vec>(shock_values, n);
        const qdap::Vec p = Eigen::Map<const qdap::Vec>(shock_probs, n);
        *out = new qdap_chain{qdap::kron_extend(chain->chain, v, p)};
    });
}

int qdap_chain_size(const qdap_chain *chain, size_t *n) {
    return api([&] {
        nonnull(chain, n);
        *n = static_cast<size_t>(chain->chain.size());
    });
}

int qdap_chain_abscissa(const qdap_chain *chain, double *buf, size_t len) {
    return api([&] {
        nonnull(chain, buf);
        copy_out(chain->chain.abscissa, buf, len);
    });
}

int qdap_chain_transition(const qdap_chain *chain, double *buf, size_t len) {
    return api([&] {
        nonnull(chain, buf);
        copy_out(chain->chain.transition, buf, len);
    });
}

int qdap_chain_ergodic(const qdap_chain *chain, double *buf, size_t len) {
    return api([&] {
        nonnull(chain, buf);
        fits(static_cast<size_t>(chain->chain.size()), len);
        copy_out(qdap::ergodic_distribution(chain->chain), buf, len);
    });
}

void qdap_chain_free(qdap_chain *chain) { delete chain; }

int qdap_system_build(const qdap_chain *chain, const qdap_ar1 *params, const qdap_model *model,
                      qdap_system **out) {
    return api([&] {
        nonnull(chain, params, model, out);
        const auto ar1 = ar1_from(params);
        qdap::UtilitySpec u;
        u.kind = model->utility == QDAP_CRRA ? qdap::UtilityKind::crra
                                             : qdap::UtilityKind::recursive_ies1;
        u.gamma = model->gamma;
        u.beta = model->beta;
        std::optional<qdap::SvSpec> sv;
        if (model->stochastic_vol) {
            sv = qdap::SvSpec::make(model->pi_g, model->gamma_g, ar1, u);
        }
        const qdap::SdfSpec sdf{model->alpha0, model->alpha1, qdap::xi_from_utility(u, ar1)};
        *out = new qdap_system{qdap::build_system(chain->chain, ar1, sdf, sv)};
    });
}

int qdap_system_size(const qdap_system *sys, size_t *n) {
    return api([&] {
        nonnull(sys, n);
        *n = static_cast<size_t>(sys->sys.b.size());
    });
}

int qdap_system_matrix_a(const qdap_system *sys, double *buf, size_t len) {
    return api([&] {
        nonnull(sys, buf);
        copy_out(sys->sys.A, buf, len);
    });
}

int qdap_system_vector_b(const qdap_system *sys, double *buf, size_t len) {
    return api([&] {
        nonnull(sys, buf);
        copy_out(sys->sys.b, buf, len);
    });
}

int qdap_system_solve(const qdap_system *sys, double *nu, size_t len) {
    return api([&] {
        nonnull(sys, nu);
        fits(static_cast<size_t>(sys->sys.b.size()), len);
        copy_out(qdap::solve_classical(sys->sys), nu, len);
    });
}

void qdap_system_free(qdap_system *sys) { delete sys; }

int qdap_xi_from_utility(qdap_utility kind, double gamma, double beta, const qdap_ar1 *params,
                         double *xi) {
    return api([&] {
        nonnull(params, xi);
        qdap::UtilitySpec u;
        u.kind = kind == QDAP_CRRA ? qdap::UtilityKind::crra : qdap::UtilityKind::recursive_ies1;
        u.gamma = gamma;
        u.beta = beta;
        *xi = qdap::xi_from_utility(u, ar1_from(params));
    });
}

int qdap_h_star(double p_dis, double recovery, double gamma, double *h_star) {
    return api([&] {
        nonnull(h_star);
        *h_star = qdap::compute_h_star(p_dis, recovery, gamma);
    });
}

int qdap_state_prepare(const double *re, const double *im, size_t len, qdap_state **out) {
    return api([&] {
        nonnull(re, out);
        qdap::CVec v(static_cast<Eigen::Index>(len));
        for (size_t i = 0; i < len; ++i) {
            v(static_cast<Eigen::Index>(i)) = {re[i], im ? im[i] : 0.0};
        }
        *out = new qdap_state{qdap::prepare_state(v)};
    });
}

int qdap_state_size(const qdap_state *state, size_t *n_amplitudes, int *n_qubits,
                    size_t *logical_dim) {
    return api([&] {
        nonnull(state);
        if (n_amplitudes) {
            *n_amplitudes = static_cast<size_t>(state->state.amplitudes.size());
        }
        if (n_qubits) {
            *n_qubits = state->state.n_qubits;
        }
        if (logical_dim) {
            *logical_dim = static_cast<size_t>(state->state.logical_dim);
        }
    });
}

int qdap_state_amplitudes(const qdap_state *state, double *re, double *im, size_t len) {
    return api([&] {
        nonnull(state, re, im);
        const auto &a = state->state.amplitudes;
        fits(static_cast<size_t>(a.size()), len);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            re[i] = a(i).real();
            im[i] = a(i).imag();
        }
    });
}

int qdap_fidelity(const qdap_state *a, const qdap_state *b, double *out) {
    return api([&] {
        nonnull(a, b, out);
        *out = qdap::fidelity(a->state, b->state);
    });
}

void qdap_state_free(qdap_state *state) { delete state; }

int qdap_hhl_ideal(const qdap_system *sys, qdap_state **out) {
    return api([&] {
        nonnull(sys, out);
        const auto h = qdap::hermitian_embed(sys->sys.A, sys->sys.b);
        *out = new qdap_state{qdap::ideal_hhl(h)};
    });
}

int qdap_hhl_circuit(const qdap_system *sys, const qdap_hhl_options *options, qdap_state **out,
                     double *success_probability) {
    return api([&] {
        nonnull(sys, out);
        qdap::HhlConfig cfg;
        if (options) {
            cfg.clock_qubits = options->clock_qubits;
            cfg.evolution_time = options->evolution_time;
            cfg.rotation_constant = options->rotation_constant;
        }
        const auto h = qdap::hermitian_embed(sys->sys.A, sys->sys.b);
        auto res = qdap::circuit_hhl(h, cfg);
        if (success_probability) {
            *success_probability = res.success_probability;
        }
        *out = new qdap_state{std::move(res.solution)};
    });
}

int qdap_sparsity(const double *matrix, size_t rows, size_t cols, double threshold, int *out) {
    return api([&] {
        nonnull(matrix, out);
        *out = qdap::sparsity(matrix_in(matrix, rows, cols), threshold);
    });
}

int qdap_condition_number(const double *matrix, size_t rows, size_t cols, double *out) {
    return api([&] {
        nonnull(matrix, out);
        *out = qdap::condition_number(matrix_in(matrix, rows, cols));
    });
}

int qdap_run(const char *command, const char *options_json) {
    return api([&] {
        nonnull(command);
        nlohmann::json opts = nlohmann::json::object();
        if (options_json && *options_json) {
            try {
                opts = nlohmann::json::parse(options_json);
            } catch (const nlohmann::json::exception &e) {
                qdap::fail(qdap::Errc::config, std::string("options: ") + e.what());
            }
        }
        qdap::require(opts.is_object() && opts.contains("config") && opts["config"].is_string(),
                      qdap::Errc::config, "options: a config path is required");
        qdap::RunConfig cfg = qdap::load_config(opts["config"].get<std::string>());
        qdap::RunOverrides o;
        try {
            if (opts.contains("seed")) {
                o.seed = opts["seed"].get<std::uint64_t>();
            }
            if (opts.contains("jobs")) {
                o.jobs = opts["jobs"].get<int>();
            }
            if (opts.contains("out")) {
                o.out = opts["out"].get<std::string>();
            }
        } catch (const nlohmann::json::exception &e) {
            qdap::fail(qdap::Errc::config, std::string("options: ") + e.what());
        }
        qdap::apply_overrides(cfg, o);
        qdap::run_command(command, cfg);
    });
}

} // extern "C"

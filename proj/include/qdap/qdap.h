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
/**
 * @file
 * C interface to libqdap.
 *
 * Every function returns a qdap_status. On failure the message of the most
 * recent error on the calling thread is available from qdap_last_error().
 * Objects are opaque handles released with the matching *_free function.
 * Matrices are exchanged as row-major double buffers. Qubit 0 is the least
 * significant bit of an amplitude index.
 */
#ifndef QDAP_QDAP_H
#define QDAP_QDAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDAP_BUILDING_LIBRARY)
#define QDAP_API __attribute__((visibility("default")))
#else
#define QDAP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdap_status {
    QDAP_OK = 0,
    QDAP_E_INVALID_PARAMETER = 1,
    QDAP_E_DOMAIN = 2,
    QDAP_E_DIMENSION = 3,
    QDAP_E_INDEX = 4,
    QDAP_E_INVALID_DISTRIBUTION = 5,
    QDAP_E_CONVERGENCE = 6,
    QDAP_E_DEGENERATE = 7,
    QDAP_E_SINGULAR = 8,
    QDAP_E_ILL_CONDITIONED = 9,
    QDAP_E_NO_SOLUTION = 10,
    QDAP_E_UNITARITY = 11,
    QDAP_E_PHASE_ALIASING = 12,
    QDAP_E_POST_SELECTION = 13,
    QDAP_E_INTEGRITY = 14,
    QDAP_E_ESTIMATION = 15,
    QDAP_E_INFEASIBLE = 16,
    QDAP_E_ZERO_DIVERGENCE = 17,
    QDAP_E_PERFECT_FIT = 18,
    QDAP_E_CANCELLATION = 19,
    QDAP_E_EMPTY_OPERATOR = 20,
    QDAP_E_REGRESSION = 21,
    QDAP_E_DATA = 22,
    QDAP_E_PARSE = 23,
    QDAP_E_CONFIG = 24,
    QDAP_E_IO = 25,
    QDAP_E_NULL_POINTER = 26,
    QDAP_E_BUFFER_TOO_SMALL = 27,
    QDAP_E_INTERNAL = 99
} qdap_status;

typedef struct qdap_chain qdap_chain;
typedef struct qdap_system qdap_system;
typedef struct qdap_state qdap_state;

typedef struct qdap_ar1 {
    double mean_level; /* a */
    double rho;
    double innov_sd; /* c */
    double obs_sd;   /* b */
} qdap_ar1;

typedef enum qdap_utility { QDAP_CRRA = 0, QDAP_RECURSIVE_IES1 = 1 } qdap_utility;

typedef struct qdap_model {
    qdap_utility utility;
    double gamma;
    double beta;
    double alpha0;
    double alpha1;
    int stochastic_vol; /* nonzero selects the two-regime volatility layout */
    double pi_g;
    double gamma_g;
} qdap_model;

typedef struct qdap_hhl_options {
    int clock_qubits;
    double evolution_time;    /* <= 0 selects the default */
    double rotation_constant; /* <= 0 selects the default */
} qdap_hhl_options;

QDAP_API const char *qdap_version(void);
QDAP_API const char *qdap_last_error(void);
QDAP_API const char *qdap_status_name(int status);
/** Process exit code for a status: 0 ok, 2 config, 3 data, 4 numerical. */
QDAP_API int qdap_exit_code(int status);

/* Markov chains */
QDAP_API int qdap_chain_discretize_ar1(const qdap_ar1 *params, int n_points, qdap_chain **out);
QDAP_API int qdap_chain_kron_extend(const qdap_chain *chain, const double *shock_values,
                                    const double *shock_probs, size_t n_shocks,
                                    qdap_chain **out);
QDAP_API int qdap_chain_size(const qdap_chain *chain, size_t *n);
QDAP_API int qdap_chain_abscissa(const qdap_chain *chain, double *buf, size_t len);
QDAP_API int qdap_chain_transition(const qdap_chain *chain, double *buf, size_t len);
QDAP_API int qdap_chain_ergodic(const qdap_chain *chain, double *buf, size_t len);
QDAP_API void qdap_chain_free(qdap_chain *chain);

/* Pricing systems */
QDAP_API int qdap_system_build(const qdap_chain *chain, const qdap_ar1 *params,
                               const qdap_model *model, qdap_system **out);
QDAP_API int qdap_system_size(const qdap_system *sys, size_t *n);
QDAP_API int qdap_system_matrix_a(const qdap_system *sys, double *buf, size_t len);
QDAP_API int qdap_system_vector_b(const qdap_system *sys, double *buf, size_t len);
QDAP_API int qdap_system_solve(const qdap_system *sys, double *nu, size_t len);
QDAP_API void qdap_system_free(qdap_system *sys);

QDAP_API int qdap_xi_from_utility(qdap_utility kind, double gamma, double beta,
                                  const qdap_ar1 *params, double *xi);
QDAP_API int qdap_h_star(double p_dis, double recovery, double gamma, double *h_star);

/* Quantum states and HHL */
QDAP_API int qdap_state_prepare(const double *re, const double *im, size_t len,
                                qdap_state **out);
QDAP_API int qdap_state_size(const qdap_state *state, size_t *n_amplitudes, int *n_qubits,
                             size_t *logical_dim);
QDAP_API int qdap_state_amplitudes(const qdap_state *state, double *re, double *im, size_t len);
QDAP_API int qdap_fidelity(const qdap_state *a, const qdap_state *b, double *out);
QDAP_API void qdap_state_free(qdap_state *state);

QDAP_API int qdap_hhl_ideal(const qdap_system *sys, qdap_state **out);
QDAP_API int qdap_hhl_circuit(const qdap_system *sys, const qdap_hhl_options *options,
                              qdap_state **out, double *success_probability);
QDAP_API int qdap_sparsity(const double *matrix, size_t rows, size_t cols, double threshold,
                           int *out);
QDAP_API int qdap_condition_number(const double *matrix, size_t rows, size_t cols, double *out);

/* Pipeline commands (estimate, discretize, solve, diagnose, measure, scan,
 * ensemble). options_json may carry "config", "seed", "jobs", "out". */
QDAP_API int qdap_run(const char *command, const char *options_json);

#ifdef __cplusplus
}
#endif

#endif

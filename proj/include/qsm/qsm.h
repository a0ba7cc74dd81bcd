/* qsm: phase space statistical mechanics of quantum oscillator gases.
 *
 * Plain C interface over the C++ core. All functions return qsm_status;
 * results travel through out-parameters. Handles are opaque and must be
 * released with their destroy function. qsm_last_error_message() gives a
 * description of the most recent failure on the calling thread.
 */
#ifndef QSM_H
#define QSM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsm_status {
    QSM_OK = 0,
    QSM_ERROR_INVALID_ARGUMENT = 1,
    QSM_ERROR_DOMAIN = 2,
    QSM_ERROR_UNSUPPORTED = 3,
    QSM_ERROR_NULL_POINTER = 4,
    QSM_ERROR_INTERNAL = 5
} qsm_status;

/* short static description of a status code */
const char* qsm_status_name(qsm_status status);
/* thread-local message from the most recent failing call */
const char* qsm_last_error_message(void);

/* --- thermodynamic state ------------------------------------------------- */

typedef struct qsm_thermo {
    double beta; /* inverse temperature, hbar = omega = m = 1 */
    double z;    /* fugacity */
    int d;       /* spatial dimension, 1..3 */
    int sign;    /* +1 bosons, -1 fermions */
} qsm_thermo;

/* --- special functions ---------------------------------------------------- */

qsm_status qsm_hermite_poly(int n, double x, double* out);
qsm_status qsm_hermite_function(int n, double x, double* out);
qsm_status qsm_hermite_function_ft(int n, double p, double* out_re, double* out_im);

/* --- commutation function evaluators -------------------------------------- */

typedef struct qsm_w_evaluator qsm_w_evaluator;

/* exact oscillator energy-state series; n_max <= 512 */
qsm_status qsm_w_evaluator_create_exact(int n_max, double tail_tol, qsm_w_evaluator** out);
/* closed-form expansion W = sum W_n beta^n, order <= 5 */
qsm_status qsm_w_evaluator_create_big_w(int order, qsm_w_evaluator** out);
/* exponential form W = exp(sum w_n), order in [1, 4] */
qsm_status qsm_w_evaluator_create_small_w(int order, qsm_w_evaluator** out);
/* symbolic recursion for the oscillator W_n, n_max <= 12 */
qsm_status qsm_w_evaluator_create_recursion(int n_max, qsm_w_evaluator** out);
void qsm_w_evaluator_destroy(qsm_w_evaluator* ev);

/* e^{-beta H} W at the phase point (P[0..d), Q[0..d)) */
qsm_status qsm_w_weighted(const qsm_w_evaluator* ev, const double* P, const double* Q, int d,
                          double beta, double* out_re, double* out_im);
/* e^{-beta H} H W_H (exact evaluators only) */
qsm_status qsm_w_weighted_energy(const qsm_w_evaluator* ev, const double* P, const double* Q,
                                 int d, double beta, double* out_re, double* out_im);

/* --- symmetrization loops -------------------------------------------------- */

/* P and Q hold l*d coordinates, particle-major */
qsm_status qsm_eta_loop(int l, int d, const double* P, const double* Q, int sign, double* out_re,
                        double* out_im);
/* r_cut_q / r_cut_p <= 0 disable the respective bound; accept is 0 or 1 */
qsm_status qsm_cutoff_accept(int l, int d, const double* P, const double* Q, double r_cut_q,
                             double r_cut_p, int* accept);

/* --- analytic ideal-gas references ----------------------------------------- */

qsm_status qsm_grand_potential_loop_term(const qsm_thermo* ts, int l, double* out);
qsm_status qsm_grand_potential(const qsm_thermo* ts, int l_max, double* out);
qsm_status qsm_grand_potential_textbook(const qsm_thermo* ts, int n_cap, double* out);
qsm_status qsm_average_energy_loop_term(const qsm_thermo* ts, int l, double* out);
qsm_status qsm_average_energy(const qsm_thermo* ts, int l_max, double* out);

/* --- deterministic quadrature ---------------------------------------------- */

typedef enum qsm_grid_rule { QSM_GRID_GAUSS_LEGENDRE = 0, QSM_GRID_MIDPOINT = 1 } qsm_grid_rule;

typedef struct qsm_grid {
    double limit_p;
    double limit_q;
    int nodes_per_axis;
    qsm_grid_rule rule;
    double shift_p; /* window displacements; for symmetry diagnostics */
    double shift_q;
} qsm_grid;

/* defaults: limits max(6, 6/sqrt(beta)); 64 nodes for l = 1, 32 for l = 2 */
qsm_grid qsm_grid_default(double beta, int loop_order);

qsm_status qsm_monomer_grand_potential(const qsm_w_evaluator* ev, const qsm_thermo* ts,
                                       const qsm_grid* grid, double* out);
qsm_status qsm_loop_grand_potential(const qsm_w_evaluator* ev, int l, const qsm_thermo* ts,
                                    const qsm_grid* grid, double r_cut_q, double r_cut_p,
                                    double* out);
qsm_status qsm_mc_loop_grand_potential(const qsm_w_evaluator* ev, int l, const qsm_thermo* ts,
                                       long long samples, uint64_t seed, double proposal_width,
                                       double r_cut_q, double r_cut_p, double* out_estimate,
                                       double* out_std_error);
/* monomer + dimer energy; use_wh != 0 routes through the energy-weighted series */
qsm_status qsm_average_energy_loops(const qsm_w_evaluator* ev, int l_max, const qsm_thermo* ts,
                                    const qsm_grid* monomer_grid, const qsm_grid* dimer_grid,
                                    double r_cut_q, double r_cut_p, int use_wh, double* out);
qsm_status qsm_imaginary_residual(const qsm_w_evaluator* ev, const qsm_thermo* ts,
                                  const qsm_grid* grid, double* out_residual, double* out_scale);

/* --- mean-field chain demo -------------------------------------------------- */

typedef struct qsm_chain qsm_chain;

/* 1-D Lennard-Jones chain with harmonic confinement; spacing sets the
 * initial lattice */
qsm_status qsm_chain_create(int n_particles, double spacing, double k_conf, qsm_chain** out);
/* overrides one particle's position before mode analysis */
qsm_status qsm_chain_displace(qsm_chain* chain, int index, double new_position);
void qsm_chain_destroy(qsm_chain* chain);

qsm_status qsm_chain_n_particles(const qsm_chain* chain, int* out);
qsm_status qsm_chain_position(const qsm_chain* chain, int index, double* out);

/* local harmonic data for particle index; valid is 0 or 1, omega/qbar/ubar
 * are meaningful only when valid */
qsm_status qsm_chain_mode(const qsm_chain* chain, int index, int* valid, double* qbar, double* ubar,
                          double* omega);
/* mean-field weighted commutation function at momenta p[0..n) */
qsm_status qsm_chain_weight(const qsm_chain* chain, double beta, const double* p, int n, int n_max,
                            double tail_tol, double* out_re, double* out_im);

#ifdef __cplusplus
}
#endif

#endif /* QSM_H */

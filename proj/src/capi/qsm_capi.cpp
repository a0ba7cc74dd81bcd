#include "qsm/qsm.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/analytic.hpp"
#include "../core/commutation.hpp"
#include "../core/hermite.hpp"
#include "../core/meanfield.hpp"
#include "../core/quadrature.hpp"
#include "../core/symmetrization.hpp"
#include "../core/types.hpp"

struct qsm_w_evaluator {
    qsm::WeightEvaluator ev;
};

struct qsm_chain {
    qsm::PotentialModel model;
    std::vector<double> config;
    mutable bool fresh = false;
    mutable qsm::LocalModeSet modes;

    const qsm::LocalModeSet& mode_set() const {
        if (!fresh) {
            modes = qsm::build_local_modes(model, config);
            fresh = true;
        }
        return modes;
    }
};

namespace {

thread_local std::string t_last_error;

template <typename Fn>
qsm_status guarded(Fn&& fn) noexcept {
    try {
        return fn();
    } catch (const qsm::UnsupportedError& e) {
        t_last_error = e.what();
        return QSM_ERROR_UNSUPPORTED;
    } catch (const std::domain_error& e) {
        t_last_error = e.what();
        return QSM_ERROR_DOMAIN;
    } catch (const std::invalid_argument& e) {
        t_last_error = e.what();
        return QSM_ERROR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return QSM_ERROR_INTERNAL;
    } catch (...) {
        t_last_error = "unidentified failure";
        return QSM_ERROR_INTERNAL;
    }
}

qsm_status null_arg(const char* what) {
    t_last_error = std::string(what) + " must not be null";
    return QSM_ERROR_NULL_POINTER;
}

qsm::ThermoState to_thermo(const qsm_thermo& ts) {
    qsm::ThermoState out;
    out.beta = ts.beta;
    out.z = ts.z;
    out.d = ts.d;
    out.sign = ts.sign;
    return out;
}

qsm::QuadratureGrid to_grid(const qsm_grid& g) {
    if (g.rule != QSM_GRID_GAUSS_LEGENDRE && g.rule != QSM_GRID_MIDPOINT)
        throw std::invalid_argument("unknown grid rule");
    qsm::QuadratureGrid out;
    out.limit_p = g.limit_p;
    out.limit_q = g.limit_q;
    out.nodes_per_axis = g.nodes_per_axis;
    out.rule = g.rule == QSM_GRID_MIDPOINT ? qsm::GridRule::midpoint : qsm::GridRule::gauss_legendre;
    out.shift_p = g.shift_p;
    out.shift_q = g.shift_q;
    return out;
}

qsm::CutoffPolicy to_cutoff(double r_cut_q, double r_cut_p) {
    qsm::CutoffPolicy pol;
    if (r_cut_q > 0) pol.r_cut_q = r_cut_q;
    if (r_cut_p > 0) pol.r_cut_p = r_cut_p;
    return pol;
}

qsm::LoopConfiguration to_loop(int l, int d, const double* P, const double* Q, int sign) {
    if (l < 1) throw std::invalid_argument("loop length must be >= 1");
    if (d < 1 || d > qsm::max_dim) throw std::invalid_argument("dimension d must be 1..3");
    qsm::LoopConfiguration loop;
    loop.sign = sign;
    loop.points.reserve(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j)
        loop.points.emplace_back(std::span<const double>(P + j * d, static_cast<size_t>(d)),
                                 std::span<const double>(Q + j * d, static_cast<size_t>(d)));
    loop.validate();
    return loop;
}

void write_complex(qsm::Complex v, double* out_re, double* out_im) {
    *out_re = v.real();
    *out_im = v.imag();
}

}  // namespace

const char* qsm_status_name(qsm_status status) {
    switch (status) {
        case QSM_OK: return "ok";
        case QSM_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case QSM_ERROR_DOMAIN: return "domain error";
        case QSM_ERROR_UNSUPPORTED: return "unsupported request";
        case QSM_ERROR_NULL_POINTER: return "null pointer";
        case QSM_ERROR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* qsm_last_error_message(void) { return t_last_error.c_str(); }

qsm_status qsm_hermite_poly(int n, double x, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::hermite_poly(n, x);
        return QSM_OK;
    });
}

qsm_status qsm_hermite_function(int n, double x, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::hermite_function(n, x);
        return QSM_OK;
    });
}

qsm_status qsm_hermite_function_ft(int n, double p, double* out_re, double* out_im) {
    if (!out_re || !out_im) return null_arg("out_re/out_im");
    return guarded([&] {
        write_complex(qsm::hermite_function_ft(n, p), out_re, out_im);
        return QSM_OK;
    });
}

qsm_status qsm_w_evaluator_create_exact(int n_max, double tail_tol, qsm_w_evaluator** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        qsm::SeriesTruncation tr;
        tr.n_max = n_max;
        tr.tail_tol = tail_tol;
        tr.validate();
        *out = new qsm_w_evaluator{qsm::WeightEvaluator::exact_series(tr)};
        return QSM_OK;
    });
}

qsm_status qsm_w_evaluator_create_big_w(int order, qsm_w_evaluator** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new qsm_w_evaluator{qsm::WeightEvaluator::big_w(order)};
        return QSM_OK;
    });
}

qsm_status qsm_w_evaluator_create_small_w(int order, qsm_w_evaluator** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new qsm_w_evaluator{qsm::WeightEvaluator::small_w(order)};
        return QSM_OK;
    });
}

qsm_status qsm_w_evaluator_create_recursion(int n_max, qsm_w_evaluator** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new qsm_w_evaluator{qsm::WeightEvaluator::sho_recursion(n_max)};
        return QSM_OK;
    });
}

void qsm_w_evaluator_destroy(qsm_w_evaluator* ev) { delete ev; }

qsm_status qsm_w_weighted(const qsm_w_evaluator* ev, const double* P, const double* Q, int d,
                          double beta, double* out_re, double* out_im) {
    if (!ev) return null_arg("evaluator");
    if (!P || !Q) return null_arg("P/Q");
    if (!out_re || !out_im) return null_arg("out_re/out_im");
    return guarded([&] {
        if (d < 1 || d > qsm::max_dim) throw std::invalid_argument("dimension d must be 1..3");
        qsm::PhasePoint pt(std::span<const double>(P, static_cast<size_t>(d)),
                           std::span<const double>(Q, static_cast<size_t>(d)));
        write_complex(ev->ev.weighted(pt, beta), out_re, out_im);
        return QSM_OK;
    });
}

qsm_status qsm_w_weighted_energy(const qsm_w_evaluator* ev, const double* P, const double* Q,
                                 int d, double beta, double* out_re, double* out_im) {
    if (!ev) return null_arg("evaluator");
    if (!P || !Q) return null_arg("P/Q");
    if (!out_re || !out_im) return null_arg("out_re/out_im");
    return guarded([&] {
        if (d < 1 || d > qsm::max_dim) throw std::invalid_argument("dimension d must be 1..3");
        if (!ev->ev.supports_energy_series())
            throw qsm::UnsupportedError("energy series needs an exact-series evaluator");
        qsm::PhasePoint pt(std::span<const double>(P, static_cast<size_t>(d)),
                           std::span<const double>(Q, static_cast<size_t>(d)));
        write_complex(ev->ev.weighted_energy(pt, beta), out_re, out_im);
        return QSM_OK;
    });
}

qsm_status qsm_eta_loop(int l, int d, const double* P, const double* Q, int sign, double* out_re,
                        double* out_im) {
    if (!P || !Q) return null_arg("P/Q");
    if (!out_re || !out_im) return null_arg("out_re/out_im");
    return guarded([&] {
        write_complex(qsm::eta_loop(to_loop(l, d, P, Q, sign)), out_re, out_im);
        return QSM_OK;
    });
}

qsm_status qsm_cutoff_accept(int l, int d, const double* P, const double* Q, double r_cut_q,
                             double r_cut_p, int* accept) {
    if (!P || !Q) return null_arg("P/Q");
    if (!accept) return null_arg("accept");
    return guarded([&] {
        const auto pol = to_cutoff(r_cut_q, r_cut_p);
        *accept = qsm::cutoff_accept(to_loop(l, d, P, Q, +1), pol) ? 1 : 0;
        return QSM_OK;
    });
}

qsm_status qsm_grand_potential_loop_term(const qsm_thermo* ts, int l, double* out) {
    if (!ts) return null_arg("thermo state");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::grand_potential_ideal_sho_term(to_thermo(*ts), l);
        return QSM_OK;
    });
}

qsm_status qsm_grand_potential(const qsm_thermo* ts, int l_max, double* out) {
    if (!ts) return null_arg("thermo state");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::grand_potential_ideal_sho(to_thermo(*ts), l_max);
        return QSM_OK;
    });
}

qsm_status qsm_grand_potential_textbook(const qsm_thermo* ts, int n_cap, double* out) {
    if (!ts) return null_arg("thermo state");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::grand_potential_textbook(to_thermo(*ts), n_cap);
        return QSM_OK;
    });
}

qsm_status qsm_average_energy_loop_term(const qsm_thermo* ts, int l, double* out) {
    if (!ts) return null_arg("thermo state");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::average_energy_ideal_sho_term(to_thermo(*ts), l);
        return QSM_OK;
    });
}

qsm_status qsm_average_energy(const qsm_thermo* ts, int l_max, double* out) {
    if (!ts) return null_arg("thermo state");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::average_energy_ideal_sho(to_thermo(*ts), l_max);
        return QSM_OK;
    });
}

qsm_grid qsm_grid_default(double beta, int loop_order) {
    const double b = (std::isfinite(beta) && beta > 0) ? beta : 1.0;
    const qsm::QuadratureGrid g = loop_order >= 2 ? qsm::QuadratureGrid::dimer_default(b)
                                                  : qsm::QuadratureGrid::monomer_default(b);
    qsm_grid out;
    out.limit_p = g.limit_p;
    out.limit_q = g.limit_q;
    out.nodes_per_axis = g.nodes_per_axis;
    out.rule = QSM_GRID_GAUSS_LEGENDRE;
    out.shift_p = 0.0;
    out.shift_q = 0.0;
    return out;
}

qsm_status qsm_monomer_grand_potential(const qsm_w_evaluator* ev, const qsm_thermo* ts,
                                       const qsm_grid* grid, double* out) {
    if (!ev) return null_arg("evaluator");
    if (!ts || !grid) return null_arg("thermo state/grid");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::monomer_grand_potential(to_thermo(*ts), to_grid(*grid), ev->ev);
        return QSM_OK;
    });
}

qsm_status qsm_loop_grand_potential(const qsm_w_evaluator* ev, int l, const qsm_thermo* ts,
                                    const qsm_grid* grid, double r_cut_q, double r_cut_p,
                                    double* out) {
    if (!ev) return null_arg("evaluator");
    if (!ts || !grid) return null_arg("thermo state/grid");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::loop_grand_potential(l, to_thermo(*ts), to_grid(*grid),
                                         to_cutoff(r_cut_q, r_cut_p), ev->ev);
        return QSM_OK;
    });
}

qsm_status qsm_mc_loop_grand_potential(const qsm_w_evaluator* ev, int l, const qsm_thermo* ts,
                                       long long samples, uint64_t seed, double proposal_width,
                                       double r_cut_q, double r_cut_p, double* out_estimate,
                                       double* out_std_error) {
    if (!ev) return null_arg("evaluator");
    if (!ts) return null_arg("thermo state");
    if (!out_estimate || !out_std_error) return null_arg("out_estimate/out_std_error");
    return guarded([&] {
        qsm::McSampler sampler;
        sampler.samples = samples;
        sampler.seed = seed;
        sampler.proposal_width = proposal_width;
        const auto est = qsm::mc_loop_grand_potential(l, to_thermo(*ts), sampler,
                                                      to_cutoff(r_cut_q, r_cut_p), ev->ev);
        *out_estimate = est.estimate;
        *out_std_error = est.std_error;
        return QSM_OK;
    });
}

qsm_status qsm_average_energy_loops(const qsm_w_evaluator* ev, int l_max, const qsm_thermo* ts,
                                    const qsm_grid* monomer_grid, const qsm_grid* dimer_grid,
                                    double r_cut_q, double r_cut_p, int use_wh, double* out) {
    if (!ev) return null_arg("evaluator");
    if (!ts || !monomer_grid || !dimer_grid) return null_arg("thermo state/grids");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = qsm::average_energy_loops(l_max, to_thermo(*ts), to_grid(*monomer_grid),
                                         to_grid(*dimer_grid), to_cutoff(r_cut_q, r_cut_p),
                                         ev->ev, use_wh != 0);
        return QSM_OK;
    });
}

qsm_status qsm_imaginary_residual(const qsm_w_evaluator* ev, const qsm_thermo* ts,
                                  const qsm_grid* grid, double* out_residual, double* out_scale) {
    if (!ev) return null_arg("evaluator");
    if (!ts || !grid) return null_arg("thermo state/grid");
    if (!out_residual || !out_scale) return null_arg("out_residual/out_scale");
    return guarded([&] {
        const auto rep = qsm::imaginary_residual(to_thermo(*ts), to_grid(*grid), ev->ev);
        *out_residual = rep.residual;
        *out_scale = rep.abs_scale;
        return QSM_OK;
    });
}

qsm_status qsm_chain_create(int n_particles, double spacing, double k_conf, qsm_chain** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        if (!(spacing > 0) || !std::isfinite(spacing))
            throw std::invalid_argument("spacing must be positive and finite");
        auto chain = std::make_unique<qsm_chain>();
        chain->model = qsm::lj_chain_model(n_particles, k_conf);
        chain->config = qsm::lj_chain_positions(n_particles, spacing);
        *out = chain.release();
        return QSM_OK;
    });
}

qsm_status qsm_chain_displace(qsm_chain* chain, int index, double new_position) {
    if (!chain) return null_arg("chain");
    return guarded([&] {
        if (index < 0 || index >= chain->model.n_particles)
            throw std::invalid_argument("particle index out of range");
        if (!std::isfinite(new_position))
            throw std::invalid_argument("position must be finite");
        chain->config[static_cast<size_t>(index)] = new_position;
        chain->fresh = false;
        return QSM_OK;
    });
}

void qsm_chain_destroy(qsm_chain* chain) { delete chain; }

qsm_status qsm_chain_n_particles(const qsm_chain* chain, int* out) {
    if (!chain) return null_arg("chain");
    if (!out) return null_arg("out");
    *out = chain->model.n_particles;
    return QSM_OK;
}

qsm_status qsm_chain_position(const qsm_chain* chain, int index, double* out) {
    if (!chain) return null_arg("chain");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (index < 0 || index >= chain->model.n_particles)
            throw std::invalid_argument("particle index out of range");
        *out = chain->config[static_cast<size_t>(index)];
        return QSM_OK;
    });
}

qsm_status qsm_chain_mode(const qsm_chain* chain, int index, int* valid, double* qbar, double* ubar,
                          double* omega) {
    if (!chain) return null_arg("chain");
    return guarded([&] {
        if (index < 0 || index >= chain->model.n_particles)
            throw std::invalid_argument("particle index out of range");
        const auto& mode = chain->mode_set().modes[static_cast<size_t>(index)];
        if (valid) *valid = mode.valid ? 1 : 0;
        if (qbar) *qbar = mode.qbar[0];
        if (ubar) *ubar = mode.ubar;
        if (omega) *omega = mode.freqs[0];
        return QSM_OK;
    });
}

qsm_status qsm_chain_weight(const qsm_chain* chain, double beta, const double* p, int n, int n_max,
                            double tail_tol, double* out_re, double* out_im) {
    if (!chain) return null_arg("chain");
    if (!p) return null_arg("p");
    if (!out_re || !out_im) return null_arg("out_re/out_im");
    return guarded([&] {
        if (n != chain->model.n_particles * chain->model.d)
            throw std::invalid_argument("momentum vector length must be n_particles * d");
        qsm::SeriesTruncation tr;
        tr.n_max = n_max;
        tr.tail_tol = tail_tol;
        tr.validate();
        const auto w = qsm::meanfield_weight(chain->mode_set(),
                                             std::span<const double>(p, static_cast<size_t>(n)),
                                             beta, tr);
        write_complex(w, out_re, out_im);
        return QSM_OK;
    });
}

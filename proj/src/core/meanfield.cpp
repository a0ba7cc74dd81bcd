#include "meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "commutation.hpp"

namespace qsm {

namespace {

std::span<const double> particle(std::span<const double> config, int d, int j) {
    return config.subspan(static_cast<size_t>(j) * d, d);
}

void check_config(const PotentialModel& model, std::span<const double> config) {
    model.validate();
    if (config.size() != static_cast<size_t>(model.n_particles) * model.d)
        throw std::invalid_argument("configuration size must be n_particles * d");
}

// gradient and hessian of U_j(r) with the other particles frozen at config
void test_particle_derivs(const PotentialModel& model, std::span<const double> config, int j,
                          std::span<const double> r, std::span<double> grad,
                          std::span<double> hess) {
    const int d = model.d;
    model.one_body_grad(j, r, grad);
    model.one_body_hess(j, r, hess);
    std::array<double, max_dim> g{};
    std::array<double, max_dim * max_dim> h{};
    for (int k = 0; k < model.n_particles; ++k) {
        if (k == j) continue;
        model.two_body_grad_a(r, particle(config, d, k), std::span(g.data(), d));
        model.two_body_hess_aa(r, particle(config, d, k), std::span(h.data(), d * d));
        for (int a = 0; a < d; ++a) grad[a] += 0.5 * g[a];
        for (int a = 0; a < d * d; ++a) hess[a] += 0.5 * h[a];
    }
}

// solves A s = b for d <= 3 by Gaussian elimination with partial pivoting;
// returns false when a pivot collapses
bool solve_small(std::array<double, max_dim * max_dim> A, std::array<double, max_dim> b, int d,
                 std::array<double, max_dim>& s) {
    double scale = 0.0;
    for (int a = 0; a < d * d; ++a) scale = std::max(scale, std::abs(A[a]));
    if (scale == 0.0) return false;
    std::array<int, max_dim> row{0, 1, 2};
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(A[row[r] * max_dim + col]) > std::abs(A[row[piv] * max_dim + col])) piv = r;
        std::swap(row[col], row[piv]);
        const double pval = A[row[col] * max_dim + col];
        if (std::abs(pval) < 1e-14 * scale) return false;
        for (int r = col + 1; r < d; ++r) {
            const double m = A[row[r] * max_dim + col] / pval;
            for (int c = col; c < d; ++c) A[row[r] * max_dim + c] -= m * A[row[col] * max_dim + c];
            b[row[r]] -= m * b[row[col]];
        }
    }
    for (int col = d - 1; col >= 0; --col) {
        double v = b[row[col]];
        for (int c = col + 1; c < d; ++c) v -= A[row[col] * max_dim + c] * s[c];
        s[col] = v / A[row[col] * max_dim + col];
    }
    return true;
}

}  // namespace

double per_particle_energy(const PotentialModel& model, std::span<const double> config, int j) {
    check_config(model, config);
    if (j < 0 || j >= model.n_particles) throw std::invalid_argument("particle index out of range");
    const int d = model.d;
    double u = model.one_body(j, particle(config, d, j));
    for (int k = 0; k < model.n_particles; ++k)
        if (k != j) u += 0.5 * model.two_body(particle(config, d, j), particle(config, d, k));
    return u;
}

double total_energy(const PotentialModel& model, std::span<const double> config) {
    check_config(model, config);
    double u = 0.0;
    for (int j = 0; j < model.n_particles; ++j) u += per_particle_energy(model, config, j);
    return u;
}

NewtonResult newton_local_min(const PotentialModel& model, std::span<const double> config, int j,
                              double tol, int max_iter, double box_scale) {
    check_config(model, config);
    if (j < 0 || j >= model.n_particles) throw std::invalid_argument("particle index out of range");
    const int d = model.d;

    NewtonResult res;
    std::array<double, max_dim> r{};
    for (int a = 0; a < d; ++a) r[a] = particle(config, d, j)[a];

    std::array<double, max_dim> grad{};
    std::array<double, max_dim * max_dim> hess_packed{};
    for (int it = 0; it <= max_iter; ++it) {
        std::array<double, max_dim * max_dim> hess{};
        test_particle_derivs(model, config, j, std::span(r.data(), d), std::span(grad.data(), d),
                             std::span(hess.data(), d * d));
        double gnorm = 0.0;
        for (int a = 0; a < d; ++a) gnorm += grad[a] * grad[a];
        gnorm = std::sqrt(gnorm);
        res.grad_norm = gnorm;
        res.qbar = r;
        res.iterations = it;
        if (gnorm < tol) {
            res.converged = true;
            return res;
        }
        if (it == max_iter) break;
        // repack d x d rows into the max_dim-strided layout solve_small expects
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) hess_packed[a * max_dim + b] = hess[a * d + b];
        std::array<double, max_dim> step{};
        if (!solve_small(hess_packed, grad, d, step)) {
            res.singular = true;
            return res;
        }
        double snorm = 0.0;
        for (int a = 0; a < d; ++a) snorm += step[a] * step[a];
        if (std::sqrt(snorm) > box_scale) return res;  // diverged
        for (int a = 0; a < d; ++a) r[a] -= step[a];
    }
    return res;
}

void hessian_eigen(std::span<const double> mat, int d, std::span<double> evals,
                   std::span<double> evecs) {
    if (d < 1 || d > max_dim) throw std::invalid_argument("eigensolver supports d = 1..3");
    if (mat.size() != static_cast<size_t>(d) * d) throw std::invalid_argument("matrix size must be d*d");
    if (evals.size() < static_cast<size_t>(d) || evecs.size() < static_cast<size_t>(d) * d)
        throw std::invalid_argument("output spans too small");

    double scale = 0.0;
    for (int a = 0; a < d * d; ++a) scale = std::max(scale, std::abs(mat[a]));
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            if (std::abs(mat[a * d + b] - mat[b * d + a]) > 1e-12 * std::max(1.0, scale))
                throw std::invalid_argument("eigensolver requires a symmetric matrix");

    std::array<double, max_dim * max_dim> A{};
    std::array<double, max_dim * max_dim> V{};
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) A[a * d + b] = mat[a * d + b];
    for (int a = 0; a < d; ++a) V[a * d + a] = 1.0;

    // cyclic Jacobi sweeps until the off-diagonal norm collapses
    for (int sweep = 0; sweep < 100 && d > 1; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += A[p * d + q] * A[p * d + q];
        if (std::sqrt(off) < 1e-14 * std::max(1.0, scale)) break;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                const double apq = A[p * d + q];
                if (apq == 0.0) continue;
                const double theta = 0.5 * (A[q * d + q] - A[p * d + p]) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = A[k * d + p], akq = A[k * d + q];
                    A[k * d + p] = c * akp - s * akq;
                    A[k * d + q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = A[p * d + k], aqk = A[q * d + k];
                    A[p * d + k] = c * apk - s * aqk;
                    A[q * d + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = V[k * d + p], vkq = V[k * d + q];
                    V[k * d + p] = c * vkp - s * vkq;
                    V[k * d + q] = s * vkp + c * vkq;
                }
            }
    }

    std::array<int, max_dim> order{0, 1, 2};
    std::sort(order.begin(), order.begin() + d,
              [&](int a, int b) { return A[a * d + a] < A[b * d + b]; });
    for (int a = 0; a < d; ++a) {
        evals[a] = A[order[a] * d + order[a]];
        for (int k = 0; k < d; ++k) evecs[k * d + a] = V[k * d + order[a]];
    }
}

LocalModeSet build_local_modes(const PotentialModel& model, std::span<const double> config,
                               double tol, int max_iter, double max_shift) {
    check_config(model, config);
    const int d = model.d;
    LocalModeSet set;
    set.d = d;
    set.n_particles = model.n_particles;
    set.config.assign(config.begin(), config.end());
    set.modes.resize(model.n_particles);

    for (int j = 0; j < model.n_particles; ++j) {
        LocalMode& mode = set.modes[j];
        mode.u_config = per_particle_energy(model, config, j);
        NewtonResult nr = newton_local_min(model, config, j, tol, max_iter);
        if (!nr.converged) continue;

        double shift = 0.0;
        for (int a = 0; a < d; ++a) {
            const double dq = nr.qbar[a] - particle(config, d, j)[a];
            shift += dq * dq;
        }
        if (std::sqrt(shift) > max_shift) continue;

        std::array<double, max_dim> grad{};
        std::array<double, max_dim * max_dim> hess{};
        test_particle_derivs(model, config, j, std::span(nr.qbar.data(), d),
                             std::span(grad.data(), d), std::span(hess.data(), d * d));

        std::array<double, max_dim> evals{};
        std::array<double, max_dim * max_dim> evecs{};
        hessian_eigen(std::span(hess.data(), d * d), d, std::span(evals.data(), d),
                      std::span(evecs.data(), d * d));
        bool positive = true;
        for (int a = 0; a < d; ++a)
            if (!(evals[a] > 0)) positive = false;
        if (!positive) continue;

        mode.valid = true;
        mode.qbar = nr.qbar;
        std::array<double, max_dim> rbar = nr.qbar;
        mode.ubar = [&] {
            // U_j evaluated at the refined minimum, partners frozen
            double u = model.one_body(j, std::span(rbar.data(), d));
            for (int k = 0; k < model.n_particles; ++k)
                if (k != j)
                    u += 0.5 * model.two_body(std::span(rbar.data(), d), particle(config, d, k));
            return u;
        }();
        for (int a = 0; a < d; ++a) {
            mode.eigvals[a] = evals[a];
            mode.freqs[a] = std::sqrt(evals[a]);
        }
        for (int a = 0; a < d * d; ++a) mode.eigvecs[a] = evecs[a];
    }
    return set;
}

Complex meanfield_weight(const LocalModeSet& modes, std::span<const double> momenta, double beta,
                         const SeriesTruncation& tr) {
    if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
    tr.validate();
    const int d = modes.d;
    const int n = modes.n_particles;
    if (momenta.size() != static_cast<size_t>(n) * d)
        throw std::invalid_argument("momenta size must be n_particles * d");
    if (modes.modes.size() != static_cast<size_t>(n) || modes.config.size() != momenta.size())
        throw std::invalid_argument("mode set does not match the configuration layout");

    Complex weight = 1.0;
    for (int j = 0; j < n; ++j) {
        const LocalMode& mode = modes.modes[j];
        std::span<const double> qj(modes.config.data() + static_cast<size_t>(j) * d, d);
        std::span<const double> pj(momenta.data() + static_cast<size_t>(j) * d, d);

        double kinetic = 0.0;
        for (int a = 0; a < d; ++a) kinetic += 0.5 * pj[a] * pj[a];

        if (!mode.valid) {
            weight *= std::exp(-beta * (mode.u_config + kinetic));
            continue;
        }

        double qp = 0.0;
        for (int a = 0; a < d; ++a) qp += qj[a] * pj[a];
        Complex factor = std::exp(-beta * mode.ubar) * std::polar(1.0, -qp);

        for (int alpha = 0; alpha < d; ++alpha) {
            double pm = 0.0, qm = 0.0;  // mode-frame momentum and displacement
            for (int k = 0; k < d; ++k) {
                pm += mode.eigvecs[k * d + alpha] * pj[k];
                qm += mode.eigvecs[k * d + alpha] * (qj[k] - mode.qbar[k]);
            }
            const double omega = mode.freqs[alpha];
            const double P = pm / std::sqrt(omega);
            const double Q = std::sqrt(omega) * qm;
            factor *= series_sum_1d(P, Q, beta * omega, tr);
        }
        weight *= factor;
    }
    return weight;
}

Complex meanfield_weight_small_w(const PotentialModel& model, std::span<const double> config,
                                 std::span<const double> momenta, double beta, int order) {
    check_config(model, config);
    if (order < 1 || order > 2)
        throw std::invalid_argument("model derivatives support small-w orders 1..2");
    if (momenta.size() != config.size())
        throw std::invalid_argument("momenta size must match the configuration");
    const int d = model.d;
    const int n = model.n_particles;

    DerivativeBundle bundle;
    bundle.gradient = [&](std::span<const double> q) {
        std::vector<double> g(q.size(), 0.0);
        std::array<double, max_dim> buf{};
        for (int j = 0; j < n; ++j) {
            std::span<const double> rj(q.data() + static_cast<size_t>(j) * d, d);
            model.one_body_grad(j, rj, std::span(buf.data(), d));
            for (int a = 0; a < d; ++a) g[j * d + a] += buf[a];
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                model.two_body_grad_a(rj, std::span(q.data() + static_cast<size_t>(k) * d, d),
                                      std::span(buf.data(), d));
                for (int a = 0; a < d; ++a) g[j * d + a] += buf[a];
            }
        }
        return g;
    };
    bundle.hessian = [&](std::span<const double> q) {
        const size_t m = q.size();
        std::vector<double> H(m * m, 0.0);
        // cross blocks by central differences on the gradient; the model
        // interface only exposes same-particle second derivatives
        const double h = 1e-5;
        std::vector<double> qp(q.begin(), q.end());
        for (size_t c = 0; c < m; ++c) {
            qp[c] = q[c] + h;
            std::vector<double> gp = bundle.gradient(qp);
            qp[c] = q[c] - h;
            std::vector<double> gm = bundle.gradient(qp);
            qp[c] = q[c];
            for (size_t r = 0; r < m; ++r) H[r * m + c] = (gp[r] - gm[r]) / (2.0 * h);
        }
        for (size_t r = 0; r < m; ++r)
            for (size_t c = r + 1; c < m; ++c) {
                const double v = 0.5 * (H[r * m + c] + H[c * m + r]);
                H[r * m + c] = H[c * m + r] = v;
            }
        return H;
    };

    const Complex W = w_general_small(bundle, momenta, config, beta, order);
    double h_total = total_energy(model, config);
    for (size_t i = 0; i < momenta.size(); ++i) h_total += 0.5 * momenta[i] * momenta[i];
    return std::exp(-beta * h_total) * W;
}

PotentialModel lj_chain_model(int n_particles, double k_conf) {
    if (n_particles < 1 || n_particles > 16)
        throw std::invalid_argument("demo chain supports 1..16 particles");
    if (k_conf < 0) throw std::invalid_argument("confinement strength must be >= 0");

    PotentialModel model;
    model.d = 1;
    model.n_particles = n_particles;
    model.one_body = [k_conf](int, std::span<const double> r) { return 0.5 * k_conf * r[0] * r[0]; };
    model.one_body_grad = [k_conf](int, std::span<const double> r, std::span<double> g) {
        g[0] = k_conf * r[0];
    };
    model.one_body_hess = [k_conf](int, std::span<const double>, std::span<double> h) {
        h[0] = k_conf;
    };
    model.two_body = [](std::span<const double> a, std::span<const double> b) {
        const double r2 = (a[0] - b[0]) * (a[0] - b[0]);
        const double ir6 = 1.0 / (r2 * r2 * r2);
        return 4.0 * (ir6 * ir6 - ir6);
    };
    model.two_body_grad_a = [](std::span<const double> a, std::span<const double> b,
                               std::span<double> g) {
        const double dx = a[0] - b[0];
        const double r2 = dx * dx;
        const double ir6 = 1.0 / (r2 * r2 * r2);
        // d/dr of 4(r^-12 - r^-6) = -48 r^-13 + 24 r^-7, times dx/r
        g[0] = (-48.0 * ir6 * ir6 + 24.0 * ir6) / r2 * dx;
    };
    model.two_body_hess_aa = [](std::span<const double> a, std::span<const double> b,
                                std::span<double> h) {
        const double dx = a[0] - b[0];
        const double r2 = dx * dx;
        const double ir6 = 1.0 / (r2 * r2 * r2);
        h[0] = (624.0 * ir6 * ir6 - 168.0 * ir6) / r2;
    };
    return model;
}

std::vector<double> lj_chain_positions(int n_particles, double spacing) {
    std::vector<double> q(n_particles);
    for (int j = 0; j < n_particles; ++j) q[j] = (j - 0.5 * (n_particles - 1)) * spacing;
    return q;
}

}  // namespace qsm

#pragma once

#include <functional>
#include <vector>

#include "types.hpp"

namespace qsm {

/// Interacting system built from one- and two-body pieces. The test-particle
/// energy of particle j is U_j(r) = u1(j, r) + 1/2 sum_{k != j} u2(r, q_k),
/// so that sum_j U_j recovers the total potential energy.
struct PotentialModel {
    int d = 1;
    int n_particles = 1;

    std::function<double(int j, std::span<const double> r)> one_body;
    std::function<void(int j, std::span<const double> r, std::span<double> grad)> one_body_grad;
    std::function<void(int j, std::span<const double> r, std::span<double> hess)> one_body_hess;

    std::function<double(std::span<const double> a, std::span<const double> b)> two_body;
    std::function<void(std::span<const double> a, std::span<const double> b, std::span<double> grad)>
        two_body_grad_a;
    std::function<void(std::span<const double> a, std::span<const double> b, std::span<double> hess)>
        two_body_hess_aa;

    void validate() const {
        if (d < 1 || d > max_dim) throw std::invalid_argument("model dimension must be 1..3");
        if (n_particles < 1 || n_particles > 64)
            throw std::invalid_argument("model supports 1..64 particles");
        if (!one_body || !one_body_grad || !one_body_hess)
            throw std::invalid_argument("model needs one-body value/gradient/hessian callbacks");
        if (n_particles > 1 && (!two_body || !two_body_grad_a || !two_body_hess_aa))
            throw std::invalid_argument("multi-particle model needs two-body callbacks");
    }
};

/// Energy share of particle j at configuration q (n_particles * d values).
double per_particle_energy(const PotentialModel& model, std::span<const double> config, int j);

/// Total potential energy, equal to the sum of the per-particle shares.
double total_energy(const PotentialModel& model, std::span<const double> config);

struct NewtonResult {
    bool converged = false;
    bool singular = false;
    int iterations = 0;
    std::array<double, max_dim> qbar{};
    double grad_norm = 0.0;
};

/// Newton iteration on U_j with every other particle frozen, starting from
/// q_j. Divergence (step beyond box_scale) and singular Hessians are
/// reported through flags, never exceptions.
NewtonResult newton_local_min(const PotentialModel& model, std::span<const double> config, int j,
                              double tol = 1e-10, int max_iter = 20, double box_scale = 100.0);

/// Jacobi eigensolver for symmetric d x d matrices (row-major). Eigenvalues
/// ascend; eigenvectors fill the columns of evecs. Throws on asymmetric
/// input.
void hessian_eigen(std::span<const double> mat, int d, std::span<double> evals,
                   std::span<double> evecs);

struct LocalMode {
    bool valid = false;
    std::array<double, max_dim> qbar{};
    double ubar = 0.0;      // U_j at the local minimum
    double u_config = 0.0;  // U_j at the actual configuration (fallback weight)
    std::array<double, max_dim> eigvals{};
    std::array<double, max_dim> freqs{};
    std::array<double, max_dim * max_dim> eigvecs{};  // columns are modes
};

struct LocalModeSet {
    int d = 1;
    int n_particles = 1;
    std::vector<double> config;
    std::vector<LocalMode> modes;
};

/// Local harmonic data for every particle: Newton minimum, eigenmodes and
/// frequencies of the test-particle Hessian. A mode set is invalid when
/// Newton fails, the minimum wanders further than max_shift, or any
/// eigenvalue is non-positive.
LocalModeSet build_local_modes(const PotentialModel& model, std::span<const double> config,
                               double tol = 1e-10, int max_iter = 20, double max_shift = 2.0);

/// Mean-field weighted commutation function at momenta p:
/// valid particles contribute e^{-beta Ubar_j} e^{-i q_j . p_j}
/// prod_alpha S(P_A, Q_A; beta omega_A) with the oscillator series S and the
/// mode coordinates P_A = (X^T p)_A / sqrt(omega_A),
/// Q_A = sqrt(omega_A) (X^T (q_j - qbar_j))_A; invalid ones fall back to the
/// classical factor e^{-beta (U_j + p_j^2/2)} with unit commutation part.
Complex meanfield_weight(const LocalModeSet& modes, std::span<const double> momenta,
                         double beta, const SeriesTruncation& tr);

/// Smoke-level alternative: the general small-w expansion over the full
/// interacting potential (orders 1..2 from the model's derivatives).
Complex meanfield_weight_small_w(const PotentialModel& model, std::span<const double> config,
                                 std::span<const double> momenta, double beta, int order);

/// Demo system: 1-D Lennard-Jones chain (epsilon = sigma = 1) with harmonic
/// confinement (k/2) q^2 per particle.
PotentialModel lj_chain_model(int n_particles, double k_conf);
std::vector<double> lj_chain_positions(int n_particles, double spacing);

}  // namespace qsm

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace qsm {

using Complex = std::complex<double>;

/// Request outside the implemented envelope (method/dimension/loop-order
/// combinations the integrators do not cover), as opposed to bad input.
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr int max_dim = 3;

/// Phase space point of one particle in d <= 3 dimensions, in the
/// dimensionless oscillator units p -> P, q -> Q.
struct PhasePoint {
    int d = 1;
    std::array<double, max_dim> p{};
    std::array<double, max_dim> q{};

    PhasePoint() = default;
    PhasePoint(double P, double Q) : d(1), p{P, 0, 0}, q{Q, 0, 0} {}
    PhasePoint(std::span<const double> P, std::span<const double> Q) {
        if (P.size() != Q.size() || P.empty() || P.size() > max_dim)
            throw std::invalid_argument("phase point needs matching p/q of dimension 1..3");
        d = static_cast<int>(P.size());
        for (int a = 0; a < d; ++a) {
            p[a] = P[a];
            q[a] = Q[a];
        }
    }

    void validate() const {
        if (d < 1 || d > max_dim) throw std::invalid_argument("phase point dimension must be 1..3");
        for (int a = 0; a < d; ++a)
            if (!std::isfinite(p[a]) || !std::isfinite(q[a]))
                throw std::invalid_argument("phase point coordinates must be finite");
    }

    double p_dot_q() const {
        double r = 0;
        for (int a = 0; a < d; ++a) r += p[a] * q[a];
        return r;
    }
    double p_sq() const {
        double r = 0;
        for (int a = 0; a < d; ++a) r += p[a] * p[a];
        return r;
    }
    double q_sq() const {
        double r = 0;
        for (int a = 0; a < d; ++a) r += q[a] * q[a];
        return r;
    }
    /// Oscillator Hamiltonian in dimensionless units, (P^2 + Q^2)/2.
    double energy() const { return 0.5 * (p_sq() + q_sq()); }
};

/// Thermodynamic state for the ideal oscillator gas. sign = +1 selects
/// bosons, -1 fermions. Units hbar = omega = m = 1 throughout.
struct ThermoState {
    double beta = 1.0;
    double z = 1.0;
    int d = 1;
    int sign = +1;

    void validate() const {
        if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
        if (!(z > 0) || !std::isfinite(z)) throw std::invalid_argument("fugacity z must be positive and finite");
        if (d < 1 || d > max_dim) throw std::invalid_argument("dimension d must be 1..3");
        if (sign != 1 && sign != -1) throw std::invalid_argument("statistics sign must be +1 or -1");
    }
};

/// Truncation control for the oscillator energy-state series.
/// n_max is the highest quantum number included; the adaptive rule stops
/// earlier once three consecutive terms fall below tail_tol.
struct SeriesTruncation {
    int n_max = 128;
    double tail_tol = 1e-12;

    static constexpr int hard_cap = 512;

    void validate() const {
        if (n_max < 0 || n_max > hard_cap)
            throw std::invalid_argument("series n_max must lie in [0, " + std::to_string(hard_cap) + "]");
        if (!(tail_tol >= 0)) throw std::invalid_argument("series tail_tol must be >= 0");
    }
};

/// Acceptance window for the loop-distance filter. Unset bounds are
/// inactive. Bounds act component-wise on consecutive loop neighbours.
struct CutoffPolicy {
    std::optional<double> r_cut_q;
    std::optional<double> r_cut_p;

    bool active() const { return r_cut_q.has_value() || r_cut_p.has_value(); }
    void validate() const {
        if (r_cut_q && !(*r_cut_q > 0)) throw std::invalid_argument("r_cut_q must be positive");
        if (r_cut_p && !(*r_cut_p > 0)) throw std::invalid_argument("r_cut_p must be positive");
    }
};

enum class GridRule { gauss_legendre, midpoint };

/// Tensor-product grid for the deterministic phase space integrals.
/// shift_p / shift_q displace the node windows so tests can break the
/// reflection symmetry on purpose and watch the imaginary residual grow.
/// Note the integrand factors obey f(-P,Q) = f(P,-Q) = conj f(P,Q), so the
/// residual only survives when BOTH axes lose their symmetric pairing.
struct QuadratureGrid {
    double limit_p = 6.0;
    double limit_q = 6.0;
    int nodes_per_axis = 64;
    GridRule rule = GridRule::gauss_legendre;
    double shift_p = 0.0;
    double shift_q = 0.0;

    void validate() const {
        if (!(limit_p > 0) || !(limit_q > 0)) throw std::invalid_argument("grid limits must be positive");
        if (nodes_per_axis < 8) throw std::invalid_argument("grid needs at least 8 nodes per axis");
    }

    static double default_limit(double beta) { return std::max(6.0, 6.0 / std::sqrt(beta)); }

    static QuadratureGrid monomer_default(double beta) {
        QuadratureGrid g;
        g.limit_p = g.limit_q = default_limit(beta);
        g.nodes_per_axis = 64;
        return g;
    }
    static QuadratureGrid dimer_default(double beta) {
        QuadratureGrid g;
        g.limit_p = g.limit_q = default_limit(beta);
        g.nodes_per_axis = 32;
        return g;
    }
};

/// Importance sampler configuration for loop orders beyond the dimer.
struct McSampler {
    long long samples = 200000;
    std::uint64_t seed = 1;
    double proposal_width = 1.0;

    void validate() const {
        if (samples < 1) throw std::invalid_argument("sampler needs at least one sample");
        if (!(proposal_width > 0)) throw std::invalid_argument("proposal width must be positive");
    }
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

}  // namespace qsm

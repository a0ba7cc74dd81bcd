#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "types.hpp"

namespace qsm {

// --- exact oscillator energy-state series ---------------------------------
//
// Per dimension the Boltzmann-weighted commutation function is
//   e^{-beta h} W = e^{-i Q P} sum_n e^{-beta(n+1/2)} i^n sqrt(2 pi)
//                                phi_n(P) phi_n(Q),
// and d dimensions multiply factor-wise. The energy-weighted companion
// carries an extra (n + 1/2) inside the sum and reassembles through
//   sum_k h_k prod_{j != k} (plain factor_j).

/// One term of the 1-D series, phase prefactor excluded.
Complex series_term_1d(int n, double P, double Q, double beta);

/// 1-D series sum without the e^{-iQP} prefactor.
Complex series_sum_1d(double P, double Q, double beta, const SeriesTruncation& tr);

/// 1-D energy-weighted series sum (extra factor n + 1/2), no prefactor.
Complex energy_series_sum_1d(double P, double Q, double beta, const SeriesTruncation& tr);

/// e^{-beta H} W at a phase point, H the oscillator Hamiltonian.
Complex weighted_w_energy_series(const PhasePoint& pt, double beta, const SeriesTruncation& tr);

/// e^{-beta H} H W_H at a phase point; equals -d/dbeta of the above.
Complex weighted_wh_energy_series(const PhasePoint& pt, double beta, const SeriesTruncation& tr);

// --- semiclassical expansions ----------------------------------------------

/// W = sum_{n<=order} W_n beta^n with the closed-form oscillator
/// coefficients (W_0=1, W_1=0, W_2..W_5 printed polynomials in
/// P^2, Q^2, R = P.Q and d). order <= 5. Returns W, not e^{-beta H} W.
Complex w_big_expansion(const PhasePoint& pt, double beta, int order);

/// W = exp(sum_{n=1}^{order} w_n) with the oscillator small-w terms,
/// order in [1, 4]. Returns W.
Complex w_small_expansion(const PhasePoint& pt, double beta, int order);

// --- symbolic recursion for the oscillator W_n ------------------------------
//
// Monomials are keyed by exponents (a, b, c, e) meaning
// (P^2)^a (Q^2)^b R^c d^e; the recursion
//   W_{n+1} = -d W_{n-1}/(2(n+1)) - Q.grad W_{n-1}/(n+1)
//             + Q^2 W_{n-2}/(2(n+1)) + lap W_n/(2(n+1))
//             + i P.grad W_n/(n+1) - i R W_{n-1}/(n+1)
// closes on that family.

struct MonomialKey {
    int a = 0, b = 0, c = 0, e = 0;
    auto operator<=>(const MonomialKey&) const = default;
};
using MonomialPoly = std::map<MonomialKey, Complex>;

class ShoRecursionTable {
public:
    /// Builds W_0 .. W_{n_max}; n_max <= 12.
    explicit ShoRecursionTable(int n_max);

    int order() const { return static_cast<int>(levels_.size()) - 1; }
    const MonomialPoly& coefficients(int n) const;

    /// Evaluates sum_{n<=order} W_n beta^n at a phase point.
    Complex evaluate(const PhasePoint& pt, double beta) const;

private:
    std::vector<MonomialPoly> levels_;
};

// --- general potential small-w expansion -----------------------------------

/// Derivative callbacks for a potential U over n degrees of freedom.
/// gradient: n values; hessian: n*n row-major; third: n^3; fourth: n^4.
/// Only the callbacks needed for the requested order may be left empty.
struct DerivativeBundle {
    std::function<std::vector<double>(std::span<const double>)> gradient;
    std::function<std::vector<double>(std::span<const double>)> hessian;
    std::function<std::vector<double>(std::span<const double>)> third;
    std::function<std::vector<double>(std::span<const double>)> fourth;
};

/// W = exp(sum_{n<=order} w_n) for a general potential, order in [1, 4],
/// units hbar = 1, mass m. p and q are full coordinate vectors.
Complex w_general_small(const DerivativeBundle& derivs, std::span<const double> p,
                        std::span<const double> q, double beta, int order, double mass = 1.0);

// --- method-erased evaluator used by the quadrature layer -------------------

enum class WMethod { exact, big_w, small_w, sho_recursion };

class WeightEvaluator {
public:
    static WeightEvaluator exact_series(SeriesTruncation tr = {});
    static WeightEvaluator big_w(int order);
    static WeightEvaluator small_w(int order);
    static WeightEvaluator sho_recursion(int n_max);

    WMethod method() const { return method_; }
    const SeriesTruncation& truncation() const { return trunc_; }
    int expansion_order() const { return order_; }

    /// true when the d-dimensional weight is the product of 1-D factors.
    /// big-W at order 0 is W = 1, which factorizes trivially.
    bool separable() const {
        return method_ == WMethod::exact || method_ == WMethod::small_w ||
               (method_ == WMethod::big_w && order_ == 0);
    }
    bool supports_energy_series() const { return method_ == WMethod::exact; }

    /// e^{-beta H} W over the full point.
    Complex weighted(const PhasePoint& pt, double beta) const;
    /// One-dimensional factor of the above (separable methods, or d = 1).
    Complex weighted_1d(double P, double Q, double beta) const;
    /// e^{-beta H} H W_H, exact series only.
    Complex weighted_energy(const PhasePoint& pt, double beta) const;
    Complex weighted_energy_1d(double P, double Q, double beta) const;

private:
    WeightEvaluator() = default;
    WMethod method_ = WMethod::exact;
    SeriesTruncation trunc_{};
    int order_ = 0;
    std::shared_ptr<const ShoRecursionTable> table_;
};

}  // namespace qsm

#pragma once

#include "types.hpp"

namespace qsm {

inline constexpr int loop_order_cap = 10000;

/// Throws std::domain_error unless z < exp(d*beta/2), the convergence
/// bound of the loop-summed ideal oscillator grand potential.
void check_divergence_guard(const ThermoState& ts);

/// Statistics-free magnitude of one loop term,
///   t_l = z^l / l * [ e^{-l beta/2} / (1 - e^{-l beta}) ]^d.
double grand_potential_ideal_sho_term(const ThermoState& ts, int l);

/// -beta Omega = sum_{l<=l_max} (sign)^{l-1} t_l for the ideal oscillator gas.
double grand_potential_ideal_sho(const ThermoState& ts, int l_max);

/// Textbook occupation form -beta Omega = -sign * sum_n ln(1 - sign z e^{-beta eps_n})
/// over the d-dimensional level lattice with n_alpha <= n_cap,
/// eps_n = d/2 + sum_alpha n_alpha. Term-wise equal to the loop sum.
double grand_potential_textbook(const ThermoState& ts, int n_cap);

/// Statistics-free magnitude of one loop term of the average energy,
///   e_l = z^l (d/2) [ e^{-l beta/2} / (1-e^{-l beta}) ]^{d-1}
///         (e^{-l beta/2} + e^{-3 l beta/2}) / (1-e^{-l beta})^2.
double average_energy_ideal_sho_term(const ThermoState& ts, int l);

/// Mean energy Ebar = sum_{l<=l_max} (sign)^{l-1} e_l; equals
/// d(beta Omega)/dbeta at fixed fugacity.
double average_energy_ideal_sho(const ThermoState& ts, int l_max);

}  // namespace qsm

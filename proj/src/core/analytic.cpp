#include "analytic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsm {

namespace {

void check_loop_order(int l) {
    if (l < 1 || l > loop_order_cap)
        throw std::invalid_argument("loop order must lie in [1, " + std::to_string(loop_order_cap) + "]");
}

double sign_pow(int sign, int l) { return (sign == -1 && (l - 1) % 2 == 1) ? -1.0 : 1.0; }

}  // namespace

void check_divergence_guard(const ThermoState& ts) {
    ts.validate();
    const double bound = std::exp(0.5 * ts.d * ts.beta);
    if (ts.z >= bound) {
        std::ostringstream msg;
        msg << "fugacity z = " << ts.z << " violates the convergence bound z < exp(d*beta/2) = " << bound;
        throw std::domain_error(msg.str());
    }
}

double grand_potential_ideal_sho_term(const ThermoState& ts, int l) {
    ts.validate();
    check_loop_order(l);
    const double lb = l * ts.beta;
    const double f = std::exp(-0.5 * lb) / (1.0 - std::exp(-lb));
    return std::pow(ts.z, l) / l * std::pow(f, ts.d);
}

double grand_potential_ideal_sho(const ThermoState& ts, int l_max) {
    check_divergence_guard(ts);
    check_loop_order(l_max);
    double sum = 0.0;
    for (int l = 1; l <= l_max; ++l) sum += sign_pow(ts.sign, l) * grand_potential_ideal_sho_term(ts, l);
    return sum;
}

double grand_potential_textbook(const ThermoState& ts, int n_cap) {
    check_divergence_guard(ts);
    if (n_cap < 0) throw std::invalid_argument("level cap must be non-negative");

    // walk the d-dimensional lattice n in [0, n_cap]^d
    std::array<int, max_dim> n{};
    double sum = 0.0;
    while (true) {
        int tot = 0;
        for (int a = 0; a < ts.d; ++a) tot += n[a];
        const double eps = 0.5 * ts.d + tot;
        sum += std::log1p(-ts.sign * ts.z * std::exp(-ts.beta * eps));
        int a = 0;
        while (a < ts.d && ++n[a] > n_cap) n[a++] = 0;
        if (a == ts.d) break;
    }
    return -ts.sign * sum;
}

double average_energy_ideal_sho_term(const ThermoState& ts, int l) {
    ts.validate();
    check_loop_order(l);
    const double lb = l * ts.beta;
    const double em = std::exp(-lb);
    const double denom = 1.0 - em;
    const double f = std::exp(-0.5 * lb) / denom;
    return std::pow(ts.z, l) * (0.5 * ts.d) * std::pow(f, ts.d - 1) *
           (std::exp(-0.5 * lb) + std::exp(-1.5 * lb)) / (denom * denom);
}

double average_energy_ideal_sho(const ThermoState& ts, int l_max) {
    check_divergence_guard(ts);
    check_loop_order(l_max);
    double sum = 0.0;
    for (int l = 1; l <= l_max; ++l) sum += sign_pow(ts.sign, l) * average_energy_ideal_sho_term(ts, l);
    return sum;
}

}  // namespace qsm

#include "hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "types.hpp"

namespace qsm {

namespace {

void check_order(int n) {
    if (n < 0) throw std::invalid_argument("hermite order must be non-negative");
    if (n > hermite_max_order)
        throw std::invalid_argument("hermite order capped at " + std::to_string(hermite_max_order));
}

}  // namespace

double hermite_poly(int n, double x) {
    check_order(n);
    if (n == 0) return 1.0;
    double hm = 1.0;        // H_0
    double h = 2.0 * x;     // H_1
    for (int k = 1; k < n; ++k) {
        double hp = 2.0 * x * h - 2.0 * k * hm;
        hm = h;
        h = hp;
    }
    return h;
}

double hermite_function(int n, double x) {
    check_order(n);
    const double phi0 = std::exp(-0.5 * x * x) / std::pow(pi, 0.25);
    if (n == 0) return phi0;
    double fm = phi0;
    double f = std::sqrt(2.0) * x * phi0;  // phi_1
    for (int k = 1; k < n; ++k) {
        double fp = x * std::sqrt(2.0 / (k + 1)) * f - std::sqrt(double(k) / (k + 1)) * fm;
        fm = f;
        f = fp;
    }
    return f;
}

void hermite_function_all(int n_max, double x, std::span<double> out) {
    check_order(n_max);
    if (out.size() < static_cast<size_t>(n_max + 1))
        throw std::invalid_argument("output span too small for requested orders");
    out[0] = std::exp(-0.5 * x * x) / std::pow(pi, 0.25);
    if (n_max == 0) return;
    out[1] = std::sqrt(2.0) * x * out[0];
    for (int k = 1; k < n_max; ++k)
        out[k + 1] = x * std::sqrt(2.0 / (k + 1)) * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
}

std::complex<double> hermite_function_ft(int n, double p) {
    const double v = std::sqrt(two_pi) * hermite_function(n, p);
    switch (n & 3) {
        case 0: return {v, 0.0};
        case 1: return {0.0, v};
        case 2: return {-v, 0.0};
        default: return {0.0, -v};
    }
}

}  // namespace qsm

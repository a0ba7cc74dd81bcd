#include "grid.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace qsm {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n,
// Chebyshev initial guesses. Classic gauleg.
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace

Axis make_axis(double limit, int nodes, GridRule rule, double shift) {
    if (!(limit > 0) || nodes < 8) throw std::invalid_argument("axis needs positive limit and >= 8 nodes");
    Axis ax;
    if (rule == GridRule::gauss_legendre) {
        gauss_legendre_unit(nodes, ax.x, ax.w);
        for (int i = 0; i < nodes; ++i) {
            ax.x[i] = ax.x[i] * limit + shift;
            ax.w[i] *= limit;
        }
    } else {
        ax.x.resize(nodes);
        ax.w.assign(nodes, 2.0 * limit / nodes);
        const double h = 2.0 * limit / nodes;
        // mirrored construction keeps x[i] == -x[n-1-i] exactly
        for (int i = 0; i < (nodes + 1) / 2; ++i) {
            double v = limit - (i + 0.5) * h;
            ax.x[nodes - 1 - i] = v + shift;
            ax.x[i] = -v + shift;
        }
    }
    return ax;
}

int worker_count() {
    // read each call so tests and batch drivers can retune between runs
    if (const char* env = std::getenv("QSM_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qsm

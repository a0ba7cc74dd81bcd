#include "symmetrization.hpp"

#include <cmath>

namespace qsm {

Complex eta_loop(const LoopConfiguration& loop) {
    loop.validate();
    const int l = loop.length();
    const int d = loop.dim();
    double angle = 0.0;
    for (int j = 0; j < l; ++j) {
        const PhasePoint& a = loop.points[j];
        const PhasePoint& b = loop.points[(j + 1) % l];  // q_{j,j+1} = q_j - q_{j+1}
        for (int k = 0; k < d; ++k) angle += (a.q[k] - b.q[k]) * a.p[k];
    }
    double s = (loop.sign == -1 && (l - 1) % 2 == 1) ? -1.0 : 1.0;
    return s * std::polar(1.0, angle);
}

bool cutoff_accept(const LoopConfiguration& loop, const CutoffPolicy& pol) {
    loop.validate();
    pol.validate();
    if (!pol.active()) return true;
    const int l = loop.length();
    const int d = loop.dim();
    for (int j = 0; j < l; ++j) {
        const PhasePoint& a = loop.points[j];
        const PhasePoint& b = loop.points[(j + 1) % l];
        for (int k = 0; k < d; ++k) {
            if (pol.r_cut_q && std::abs(a.q[k] - b.q[k]) > *pol.r_cut_q) return false;
            if (pol.r_cut_p && std::abs(a.p[k] - b.p[k]) > *pol.r_cut_p) return false;
        }
    }
    return true;
}

}  // namespace qsm

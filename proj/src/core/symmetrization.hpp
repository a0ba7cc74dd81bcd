#pragma once

#include <vector>

#include "types.hpp"

namespace qsm {

/// An l-cycle of phase space points plus the statistics sign.
struct LoopConfiguration {
    std::vector<PhasePoint> points;
    int sign = +1;

    int length() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : points[0].d; }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("loop needs at least one point");
        if (sign != 1 && sign != -1) throw std::invalid_argument("statistics sign must be +1 or -1");
        const int d = points[0].d;
        for (const auto& pt : points) {
            pt.validate();
            if (pt.d != d) throw std::invalid_argument("loop points must share one dimension");
        }
    }
};

/// Symmetrization phase of an l-cycle,
///   eta = (sign)^{l-1} exp(i [ (q_l - q_1).p_l + sum_j (q_j - q_{j+1}).p_j ]),
/// unit modulus by construction. hbar = 1.
Complex eta_loop(const LoopConfiguration& loop);

/// True when every cyclically consecutive pair satisfies the component-wise
/// bounds |dq| <= r_cut_q and |dp| <= r_cut_p (inactive bounds always pass).
bool cutoff_accept(const LoopConfiguration& loop, const CutoffPolicy& pol);

}  // namespace qsm

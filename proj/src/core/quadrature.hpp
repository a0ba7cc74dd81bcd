#pragma once

#include "commutation.hpp"
#include "symmetrization.hpp"
#include "types.hpp"

namespace qsm {

struct ResidualReport {
    double residual = 0.0;   // integral of the imaginary part
    double abs_scale = 0.0;  // integral of |integrand|, for relative checks
};

/// Monomer term of -beta Omega by deterministic quadrature,
///   z (2 pi)^{-d} \int dP dQ Re[ e^{-beta H} W ].
double monomer_grand_potential(const ThermoState& ts, const QuadratureGrid& grid,
                               const WeightEvaluator& ev);

/// l-loop term of -beta Omega by deterministic quadrature (l <= 2),
///   sign^{l-1} z^l / l (2 pi)^{-ld} \int dGamma^l
///       Re[ prod_j e^{-beta H_j} W_j * loop phase ] * cutoff.
double loop_grand_potential(int l, const ThermoState& ts, const QuadratureGrid& grid,
                            const CutoffPolicy& pol, const WeightEvaluator& ev);

/// Same loop term by Gaussian importance sampling (any l >= 2), with a
/// jackknife standard error over fixed sample chunks. Results depend on
/// the seed and sample count only, never on the worker count.
/// force_unit_phase drops the loop phase (testing hook).
McEstimate mc_loop_grand_potential(int l, const ThermoState& ts, const McSampler& sampler,
                                   const CutoffPolicy& pol, const WeightEvaluator& ev,
                                   bool force_unit_phase = false);

/// Mean energy summed over loop terms: deterministic grids for l <= 2,
/// importance sampling beyond (sampler required there). With use_wh the
/// energy insertion uses the energy-weighted series
///   prod_j W_j sum_k H_k  ->  sum_k W_{H,k} H_k prod_{j != k} W_j;
/// otherwise the bare Hamiltonian multiplies the plain weight.
double average_energy_loops(int l_max, const ThermoState& ts, const QuadratureGrid& monomer_grid,
                            const QuadratureGrid& dimer_grid, const CutoffPolicy& pol,
                            const WeightEvaluator& ev, bool use_wh,
                            const McSampler* sampler = nullptr);

/// Integral of the imaginary part of the monomer integrand. On a
/// momentum-symmetric grid this should vanish to rounding.
ResidualReport imaginary_residual(const ThermoState& ts, const QuadratureGrid& grid,
                                  const WeightEvaluator& ev);

}  // namespace qsm

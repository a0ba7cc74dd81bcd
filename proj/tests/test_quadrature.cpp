#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "core/analytic.hpp"
#include "core/quadrature.hpp"
#include "core/types.hpp"

using namespace qsm;

namespace {

ThermoState state(double beta, double z = 1.0, int d = 1, int sign = +1) {
    ThermoState ts;
    ts.beta = beta;
    ts.z = z;
    ts.d = d;
    ts.sign = sign;
    return ts;
}

QuadratureGrid grid_n(double beta, int nodes) {
    QuadratureGrid g;
    g.limit_p = g.limit_q = QuadratureGrid::default_limit(beta);
    g.nodes_per_axis = nodes;
    return g;
}

// geometric sum of e^{-beta(n+1/2)} up to n_max, the value a truncated
// series must integrate to
double truncated_monomer(double beta, int n_max) {
    return std::exp(-0.5 * beta) * (1.0 - std::exp(-beta * (n_max + 1))) /
           (1.0 - std::exp(-beta));
}

WeightEvaluator truncated_series(int n_max) {
    SeriesTruncation tr;
    tr.n_max = n_max;
    tr.tail_tol = 0.0;  // defeat the adaptive early-out
    return WeightEvaluator::exact_series(tr);
}

}  // namespace

TEST_CASE("unit weight reproduces the classical Gaussian partition integral") {
    const auto unit = WeightEvaluator::big_w(0);
    // at beta = 1 the window at |x| <= 6 leaves a boundary deficit of about
    // 2e-9 per axis, so the d = 3 case runs at beta = 2 where it vanishes
    for (int d : {1, 2}) {
        const double got = monomer_grand_potential(state(1.0, 1.0, d),
                                                   QuadratureGrid::monomer_default(1.0), unit);
        CHECK(std::fabs(got - 1.0) < 1e-8);
    }
    const double got3 =
        monomer_grand_potential(state(2.0, 1.0, 3), QuadratureGrid::monomer_default(2.0), unit);
    CHECK(std::fabs(got3 - 0.125) < 1e-8 * 0.125);
}

TEST_CASE("monomer quadrature tracks the analytic loop term across beta") {
    const auto exact = WeightEvaluator::exact_series({});
    for (double beta : {0.5, 1.0, 2.0, 3.0}) {
        const ThermoState ts = state(beta);
        const double got = monomer_grand_potential(ts, QuadratureGrid::monomer_default(beta), exact);
        const double want = grand_potential_ideal_sho_term(ts, 1);
        CHECK(std::fabs(got - want) / want < 1e-6);
    }
}

TEST_CASE("truncated series integrates to its geometric sum") {
    const ThermoState ts = state(0.2);
    // converged grid: the truncated integrand keeps the fast loop phase
    for (int n_max : {8, 4}) {
        const double got = monomer_grand_potential(ts, grid_n(0.2, 128), truncated_series(n_max));
        const double want = truncated_monomer(0.2, n_max);
        CHECK(std::fabs(got - want) / want < 1e-8);
    }
    // the default 64-node grid already lands inside the coarse windows
    CHECK(monomer_grand_potential(ts, QuadratureGrid::monomer_default(0.2), truncated_series(8)) ==
          doctest::Approx(4.17).epsilon(0.012));
    CHECK(monomer_grand_potential(ts, QuadratureGrid::monomer_default(0.2), truncated_series(4)) ==
          doctest::Approx(3.16).epsilon(0.016));
}

TEST_CASE("dimer quadrature integrates truncated and adaptive series correctly") {
    const ThermoState ts = state(0.2);
    const CutoffPolicy none;
    // truncated dimer collapses to (z^2/2) sum of e^{-2 beta (n+1/2)}
    for (int n_max : {8, 4}) {
        const double got = loop_grand_potential(2, ts, grid_n(0.2, 96), none, truncated_series(n_max));
        const double want = 0.5 * truncated_monomer(0.4, n_max);
        CHECK(std::fabs(got - want) / want < 1e-9);
    }
    // adaptive series against the analytic two-loop term
    const double got = loop_grand_potential(2, ts, grid_n(0.2, 128), none,
                                            WeightEvaluator::exact_series({}));
    const double want = grand_potential_ideal_sho_term(ts, 2);
    CHECK(std::fabs(got - want) / want < 1e-6);

    // at moderate temperature the default dimer grid is already converged
    const ThermoState t1 = state(1.0);
    const double g1 = loop_grand_potential(2, t1, QuadratureGrid::dimer_default(1.0), none,
                                           WeightEvaluator::exact_series({}));
    CHECK(std::fabs(g1 - grand_potential_ideal_sho_term(t1, 2)) < 1e-9);

    // fermion dimer term flips sign, same magnitude
    const ThermoState tf = state(1.0, 1.0, 1, -1);
    const double gf = loop_grand_potential(2, tf, QuadratureGrid::dimer_default(1.0), none,
                                           WeightEvaluator::exact_series({}));
    CHECK(gf == -g1);
}

TEST_CASE("grid refinement converges and then stays put") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(1.0);
    const double oracle = grand_potential_ideal_sho_term(ts, 1);

    const double e12 = std::fabs(monomer_grand_potential(ts, grid_n(1.0, 12), exact) - oracle);
    const double e16 = std::fabs(monomer_grand_potential(ts, grid_n(1.0, 16), exact) - oracle);
    const double v24 = monomer_grand_potential(ts, grid_n(1.0, 24), exact);
    const double v48 = monomer_grand_potential(ts, grid_n(1.0, 48), exact);
    const double v64 = monomer_grand_potential(ts, grid_n(1.0, 64), exact);

    CHECK(e12 > 1e-4);       // coarse grid visibly off
    CHECK(e16 < e12 / 10);   // spectral convergence kicks in
    CHECK(e16 < 1e-4);
    // converged regime: refinement moves the result far less than the
    // remaining distance to the oracle (that floor is the |x| <= 6 window)
    CHECK(std::fabs(v48 - v24) < 0.1 * std::fabs(v24 - oracle));
    CHECK(std::fabs(v64 - v48) < 1e-10);
    CHECK(std::fabs(v64 - oracle) < 1e-7);

    // widening the window removes the tail bias
    QuadratureGrid wide = grid_n(1.0, 48);
    wide.limit_p = wide.limit_q = 8.0;
    CHECK(std::fabs(monomer_grand_potential(ts, wide, exact) - oracle) < 1e-9);

    // the midpoint rule converges too (exponentially, for decaying analytic
    // integrands)
    QuadratureGrid mid = grid_n(1.0, 64);
    mid.rule = GridRule::midpoint;
    CHECK(std::fabs(monomer_grand_potential(ts, mid, exact) - oracle) < 1e-6);
}

TEST_CASE("open dimer fast path equals the windowed path with an absent window") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(1.0);
    const QuadratureGrid g = grid_n(1.0, 24);
    CutoffPolicy everything;
    everything.r_cut_q = 1e6;
    everything.r_cut_p = 1e6;
    const double fast = loop_grand_potential(2, ts, g, {}, exact);
    const double slow = loop_grand_potential(2, ts, g, everything, exact);
    CHECK(std::fabs(fast - slow) < 1e-13);

    // energies through both paths as well
    const QuadratureGrid m = grid_n(1.0, 24);
    const double ef = average_energy_loops(2, ts, m, g, {}, exact, true);
    const double es = average_energy_loops(2, ts, m, g, everything, exact, true);
    CHECK(std::fabs(ef - es) < 1e-12);
}

TEST_CASE("wide distance window barely moves the dimer, a tight one bites") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(1.0);
    const QuadratureGrid g = grid_n(1.0, 48);
    const double open = loop_grand_potential(2, ts, g, {}, exact);

    CutoffPolicy window;
    window.r_cut_q = 4.0;
    window.r_cut_p = 4.0;
    const double cut = loop_grand_potential(2, ts, g, window, exact);
    CHECK(std::fabs(cut - open) / open < 1e-3);

    CutoffPolicy tight;
    tight.r_cut_q = 0.5;
    const double squeezed = loop_grand_potential(2, ts, g, tight, exact);
    CHECK(std::fabs(squeezed - open) / open > 0.1);
}

TEST_CASE("loop energies match the analytic terms and both energy insertions agree") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(1.0);
    const QuadratureGrid m = QuadratureGrid::monomer_default(1.0);
    const QuadratureGrid d = QuadratureGrid::dimer_default(1.0);

    // the H factor widens the integrand, so the default |x| <= 6 window
    // leaves a few-times-1e-7 bias; a wider window removes it
    const double e1 = average_energy_loops(1, ts, m, d, {}, exact, true);
    CHECK(e1 == doctest::Approx(1.0382).epsilon(2e-4));
    CHECK(std::fabs(e1 - average_energy_ideal_sho_term(ts, 1)) < 1e-6);

    QuadratureGrid mw = m;
    mw.limit_p = mw.limit_q = 8.0;
    const double e1w = average_energy_loops(1, ts, mw, d, {}, exact, true);
    CHECK(std::fabs(e1w - average_energy_ideal_sho_term(ts, 1)) < 1e-9);

    for (int sign : {+1, -1}) {
        const ThermoState t2 = state(1.0, 1.0, 1, sign);
        const double got = average_energy_loops(2, t2, m, d, {}, exact, true);
        const double want = average_energy_ideal_sho(t2, 2);
        CHECK(std::fabs(got - want) / std::fabs(want) < 1e-6);
    }

    // energy-weighted series insertion vs bare Hamiltonian insertion
    for (double beta : {0.5, 1.0, 2.0}) {
        const ThermoState tb = state(beta);
        const QuadratureGrid mb = QuadratureGrid::monomer_default(beta);
        const QuadratureGrid db = QuadratureGrid::dimer_default(beta);
        const double wh = average_energy_loops(2, tb, mb, db, {}, exact, true);
        const double bare = average_energy_loops(2, tb, mb, db, {}, exact, false);
        CHECK(std::fabs(wh - bare) / std::fabs(wh) < 1e-7);
    }
}

TEST_CASE("imaginary residual vanishes on symmetric grids and trips on shifted ones") {
    const auto exact = WeightEvaluator::exact_series({});
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto rep = imaginary_residual(state(beta), QuadratureGrid::monomer_default(beta), exact);
        CHECK(std::fabs(rep.residual) <= 1e-12 * rep.abs_scale);
        CHECK(rep.abs_scale > 0.0);
    }

    // real integrand: residual is identically zero
    const auto rep0 =
        imaginary_residual(state(1.0), QuadratureGrid::monomer_default(1.0), WeightEvaluator::big_w(0));
    CHECK(rep0.residual == 0.0);

    // the integrand factors satisfy f(-P,Q) = f(P,-Q) = conj f(P,Q), so a
    // symmetric axis on EITHER side cancels the imaginary part; shifting
    // only the momentum window must not trip the detector
    QuadratureGrid p_only = grid_n(1.0, 12);
    p_only.shift_p = 0.35;
    const auto rep_p = imaginary_residual(state(1.0), p_only, exact);
    CHECK(std::fabs(rep_p.residual) <= 1e-12 * rep_p.abs_scale);

    // shifting both windows removes every symmetric pairing: flagged
    QuadratureGrid skew = p_only;
    skew.shift_q = 0.35;
    const auto rep_s = imaginary_residual(state(1.0), skew, exact);
    CHECK(std::fabs(rep_s.residual) > 1e-10 * rep_s.abs_scale);
    CHECK(std::fabs(rep_s.residual) < 1e-3 * rep_s.abs_scale);
}

TEST_CASE("two-dimensional monomer accepts non-separable weights") {
    // big-W order 5 and its recursion-built twin are the same polynomial,
    // one through the separability bypass, both through the full tensor
    const ThermoState ts = state(0.7, 1.0, 2);
    const QuadratureGrid g = grid_n(0.7, 24);
    const double a = monomer_grand_potential(ts, g, WeightEvaluator::big_w(5));
    const double b = monomer_grand_potential(ts, g, WeightEvaluator::sho_recursion(5));
    CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(a));

    // and the separable exact series agrees with the analytic term in d = 2
    const double c = monomer_grand_potential(ts, grid_n(0.7, 48), WeightEvaluator::exact_series({}));
    CHECK(std::fabs(c - grand_potential_ideal_sho_term(ts, 1)) / c < 1e-6);
}

TEST_CASE("sampler recovers the Gaussian normalization with unit weight and phase") {
    const McSampler sampler{20000, 7, 1.0};
    const auto est =
        mc_loop_grand_potential(2, state(1.0), sampler, {}, WeightEvaluator::big_w(0), true);
    CHECK(est.estimate == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.std_error < 1e-12);
}

TEST_CASE("sampler agrees with the deterministic dimer inside three errors") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(1.0);
    const double det = loop_grand_potential(2, ts, grid_n(1.0, 48), {}, exact);
    const McSampler sampler{200000, 1, 1.0};
    const auto est = mc_loop_grand_potential(2, ts, sampler, {}, exact);
    CHECK(est.std_error > 0.0);
    CHECK(std::fabs(est.estimate - det) < 3.0 * est.std_error);
}

TEST_CASE("three-loop boson estimate lands on the analytic term") {
    const ThermoState ts = state(2.0);
    const McSampler sampler{200000, 11, 1.0};
    const auto est = mc_loop_grand_potential(3, ts, sampler, {}, WeightEvaluator::exact_series({}));
    const double t3 = grand_potential_ideal_sho_term(ts, 3);
    const double t2 = grand_potential_ideal_sho_term(ts, 2);
    CHECK(est.estimate > 0.0);
    CHECK(est.estimate < t2);
    CHECK(std::fabs(est.estimate - t3) < 5.0 * est.std_error);
}

TEST_CASE("sampler output is a pure function of the seed") {
    const ThermoState ts = state(1.5);
    const McSampler a{50000, 42, 1.0};
    const auto exact = WeightEvaluator::exact_series({});
    const auto r1 = mc_loop_grand_potential(2, ts, a, {}, exact);
    const auto r2 = mc_loop_grand_potential(2, ts, a, {}, exact);
    CHECK(r1.estimate == r2.estimate);
    CHECK(r1.std_error == r2.std_error);
    McSampler b = a;
    b.seed = 43;
    const auto r3 = mc_loop_grand_potential(2, ts, b, {}, exact);
    CHECK(r1.estimate != r3.estimate);
}

TEST_CASE("results are bit-identical across worker counts") {
    const auto exact = WeightEvaluator::exact_series({});
    const ThermoState ts = state(0.8);
    const QuadratureGrid g = grid_n(0.8, 32);
    const McSampler sampler{40000, 5, 1.0};

    setenv("QSM_THREADS", "1", 1);
    const double gp1 = loop_grand_potential(2, ts, g, {}, exact);
    const auto mc1 = mc_loop_grand_potential(2, ts, sampler, {}, exact);
    setenv("QSM_THREADS", "4", 1);
    const double gp4 = loop_grand_potential(2, ts, g, {}, exact);
    const auto mc4 = mc_loop_grand_potential(2, ts, sampler, {}, exact);
    unsetenv("QSM_THREADS");

    CHECK(gp1 == gp4);
    CHECK(mc1.estimate == mc4.estimate);
    CHECK(mc1.std_error == mc4.std_error);
}

TEST_CASE("unsupported requests fail loudly") {
    const auto exact = WeightEvaluator::exact_series({});
    const auto big = WeightEvaluator::big_w(5);
    const QuadratureGrid g = grid_n(1.0, 16);

    CHECK_THROWS_AS(loop_grand_potential(3, state(1.0), g, {}, exact), UnsupportedError);
    CHECK_THROWS_AS(loop_grand_potential(0, state(1.0), g, {}, exact), std::invalid_argument);
    CHECK_THROWS_AS(average_energy_loops(2, state(1.0), g, g, {}, big, true), UnsupportedError);
    CHECK_THROWS_AS(average_energy_loops(3, state(1.0), g, g, {}, exact, true),
                    std::invalid_argument);  // no sampler supplied
    CHECK_THROWS_AS(monomer_grand_potential(state(1.0, 1.0, 3), g, WeightEvaluator::sho_recursion(5)),
                    UnsupportedError);
    CHECK_THROWS_AS(loop_grand_potential(2, state(1.0, 1.0, 2), g, {}, big), UnsupportedError);
    CHECK_THROWS_AS(mc_loop_grand_potential(1, state(1.0), McSampler{}, {}, exact),
                    std::invalid_argument);

    QuadratureGrid coarse = g;
    coarse.nodes_per_axis = 4;
    CHECK_THROWS_AS(monomer_grand_potential(state(1.0), coarse, exact), std::invalid_argument);
    QuadratureGrid negative = g;
    negative.limit_q = -2.0;
    CHECK_THROWS_AS(monomer_grand_potential(state(1.0), negative, exact), std::invalid_argument);
}

#include "quadrature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace qsm {

namespace {

double sign_pow(int sign, int l) { return (sign == -1 && (l - 1) % 2 == 1) ? -1.0 : 1.0; }

struct Sum2 {
    Complex a{};
    Complex b{};
    Sum2 operator+(const Sum2& o) const { return {a + o.a, b + o.b}; }
    Sum2& operator+=(const Sum2& o) {
        a += o.a;
        b += o.b;
        return *this;
    }
};

enum class EnergyKind { none, bare_h, wh_series };

// Weighted per-dimension tables on the (P_i, Q_j) node grid. F carries the
// plain factor, G the energy-weighted one (per EnergyKind), both with the
// quadrature weights folded in.
struct DimTables {
    Axis P, Q;
    std::vector<Complex> F;
    std::vector<Complex> G;
};

DimTables build_tables(const QuadratureGrid& grid, const WeightEvaluator& ev, double beta,
                       EnergyKind ekind) {
    grid.validate();
    DimTables t;
    t.P = make_axis(grid.limit_p, grid.nodes_per_axis, grid.rule, grid.shift_p);
    t.Q = make_axis(grid.limit_q, grid.nodes_per_axis, grid.rule, grid.shift_q);
    const int n = grid.nodes_per_axis;
    t.F.resize(static_cast<size_t>(n) * n);
    if (ekind != EnergyKind::none) t.G.resize(static_cast<size_t>(n) * n);
    reduce_blocks<int>(n, [&](long long i) {
        for (int j = 0; j < n; ++j) {
            const double P = t.P.x[i], Q = t.Q.x[j];
            const double w = t.P.w[i] * t.Q.w[j];
            const Complex f = ev.weighted_1d(P, Q, beta);
            t.F[i * n + j] = w * f;
            if (ekind == EnergyKind::bare_h)
                t.G[i * n + j] = w * f * (0.5 * (P * P + Q * Q));
            else if (ekind == EnergyKind::wh_series)
                t.G[i * n + j] = w * ev.weighted_energy_1d(P, Q, beta);
        }
        return 0;
    });
    return t;
}

// 2-D reductions of the monomer tables. plain = sum F, energy = sum G.
Sum2 monomer_reduce(const DimTables& t) {
    const long long n = t.P.x.size();
    return reduce_blocks<Sum2>(n, [&](long long i) {
        return pairwise_sum<Sum2>(0, n, [&](long long j) {
            Sum2 s;
            s.a = t.F[i * n + j];
            if (!t.G.empty()) s.b = t.G[i * n + j];
            return s;
        });
    });
}

// Cutoff-free 4-D dimer reduction in O(n^3). The loop phase splits,
//   e^{i(Q1-Q2)(P1-P2)} = e^{iQ1P1} e^{-iQ1P2} e^{-iQ2P1} e^{iQ2P2},
// so with the dressed tables A[i,j] = F[i,j] e^{iQ_jP_i} and the kernel
// E[j,k] = e^{-iQ_jP_k} the full sum collapses to
//   sum_{i,k} M[i,k] M[k,i],  M = A E,
// and likewise for the energy pairing. Summation stays pairwise and
// block-ordered, so results are bit-stable across worker counts.
Sum2 dimer_reduce_open(const DimTables& t) {
    const long long n = static_cast<long long>(t.P.x.size());
    const bool with_energy = !t.G.empty();

    std::vector<Complex> kernel(static_cast<size_t>(n) * n);
    for (long long j = 0; j < n; ++j)
        for (long long k = 0; k < n; ++k)
            kernel[j * n + k] = std::polar(1.0, -t.Q.x[j] * t.P.x[k]);

    std::vector<Complex> mf(static_cast<size_t>(n) * n);
    std::vector<Complex> mg(with_energy ? static_cast<size_t>(n) * n : 0);
    reduce_blocks<int>(n, [&](long long i) {
        for (long long k = 0; k < n; ++k) {
            mf[i * n + k] = pairwise_sum<Complex>(0, n, [&](long long j) {
                const Complex dressed = t.F[i * n + j] * std::polar(1.0, t.Q.x[j] * t.P.x[i]);
                return dressed * kernel[j * n + k];
            });
            if (with_energy)
                mg[i * n + k] = pairwise_sum<Complex>(0, n, [&](long long j) {
                    const Complex dressed = t.G[i * n + j] * std::polar(1.0, t.Q.x[j] * t.P.x[i]);
                    return dressed * kernel[j * n + k];
                });
        }
        return 0;
    });

    return reduce_blocks<Sum2>(n, [&](long long i) {
        return pairwise_sum<Sum2>(0, n, [&](long long k) {
            Sum2 s;
            s.a = mf[i * n + k] * mf[k * n + i];
            if (with_energy) s.b = mf[i * n + k] * mg[k * n + i] + mg[i * n + k] * mf[k * n + i];
            return s;
        });
    });
}

// 4-D reduction of the one-dimensional dimer integral with loop phase and
// cutoff. plain = sum F F phase, energy = sum (F G + G F) phase.
Sum2 dimer_reduce(const DimTables& t, const CutoffPolicy& pol) {
    if (!pol.active()) return dimer_reduce_open(t);
    const long long n = t.P.x.size();
    const bool with_energy = !t.G.empty();
    const double rq = pol.r_cut_q.value_or(0.0);
    const double rp = pol.r_cut_p.value_or(0.0);
    const bool cq = pol.r_cut_q.has_value();
    const bool cp = pol.r_cut_p.has_value();

    return reduce_blocks<Sum2>(n, [&](long long i1) {
        const double P1 = t.P.x[i1];
        return pairwise_sum<Sum2>(0, n * n * n, [&](long long rest) {
            const long long j1 = rest / (n * n);
            const long long i2 = (rest / n) % n;
            const long long j2 = rest % n;
            const double Q1 = t.Q.x[j1], P2 = t.P.x[i2], Q2 = t.Q.x[j2];
            if (cq && std::abs(Q1 - Q2) > rq) return Sum2{};
            if (cp && std::abs(P1 - P2) > rp) return Sum2{};
            const Complex phase = std::polar(1.0, (Q1 - Q2) * (P1 - P2));
            const Complex f1 = t.F[i1 * n + j1];
            const Complex f2 = t.F[i2 * n + j2];
            Sum2 s;
            s.a = f1 * f2 * phase;
            if (with_energy) s.b = (f1 * t.G[i2 * n + j2] + t.G[i1 * n + j1] * f2) * phase;
            return s;
        });
    });
}

// Full-tensor monomer for non-separable weights in d = 2 (4 axes).
Sum2 monomer_full_2d(const ThermoState& ts, const QuadratureGrid& grid, const WeightEvaluator& ev,
                     EnergyKind ekind) {
    const Axis P = make_axis(grid.limit_p, grid.nodes_per_axis, grid.rule, grid.shift_p);
    const Axis Q = make_axis(grid.limit_q, grid.nodes_per_axis, grid.rule, grid.shift_q);
    const long long n = grid.nodes_per_axis;
    return reduce_blocks<Sum2>(n, [&](long long i1) {
        return pairwise_sum<Sum2>(0, n * n * n, [&](long long rest) {
            const long long j1 = rest / (n * n);
            const long long i2 = (rest / n) % n;
            const long long j2 = rest % n;
            PhasePoint pt;
            pt.d = 2;
            pt.p = {P.x[i1], P.x[i2], 0.0};
            pt.q = {Q.x[j1], Q.x[j2], 0.0};
            const double w = P.w[i1] * Q.w[j1] * P.w[i2] * Q.w[j2];
            Sum2 s;
            s.a = w * ev.weighted(pt, ts.beta);
            if (ekind == EnergyKind::bare_h) s.b = s.a * pt.energy();
            return s;
        });
    });
}

void require_supported_layout(const ThermoState& ts, const WeightEvaluator& ev, int l) {
    if (ts.d == 1 || ev.separable()) return;
    if (l == 1 && ts.d == 2) return;
    throw UnsupportedError(
        "non-separable weight methods support deterministic grids only for d = 1 (any loop) or "
        "d = 2 (monomer)");
}

double norm_scale_2pi(int power) { return std::pow(two_pi, -power); }

}  // namespace

double monomer_grand_potential(const ThermoState& ts, const QuadratureGrid& grid,
                               const WeightEvaluator& ev) {
    ts.validate();
    grid.validate();
    require_supported_layout(ts, ev, 1);
    if (ts.d > 1 && !ev.separable()) {
        Sum2 s = monomer_full_2d(ts, grid, ev, EnergyKind::none);
        return ts.z * norm_scale_2pi(2) * s.a.real();
    }
    DimTables t = build_tables(grid, ev, ts.beta, EnergyKind::none);
    Complex M = monomer_reduce(t).a * norm_scale_2pi(1);
    Complex prod = 1.0;
    for (int a = 0; a < ts.d; ++a) prod *= M;
    return ts.z * prod.real();
}

double loop_grand_potential(int l, const ThermoState& ts, const QuadratureGrid& grid,
                            const CutoffPolicy& pol, const WeightEvaluator& ev) {
    ts.validate();
    grid.validate();
    pol.validate();
    if (l < 1) throw std::invalid_argument("loop order must be >= 1");
    if (l > 2)
        throw UnsupportedError("deterministic grids support loop orders l <= 2; use the sampler");
    if (l == 1) return monomer_grand_potential(ts, grid, ev);
    require_supported_layout(ts, ev, l);

    DimTables t = build_tables(grid, ev, ts.beta, EnergyKind::none);
    Complex D = dimer_reduce(t, pol).a * norm_scale_2pi(2);
    Complex prod = 1.0;
    for (int a = 0; a < ts.d; ++a) prod *= D;
    return sign_pow(ts.sign, 2) * 0.5 * ts.z * ts.z * prod.real();
}

ResidualReport imaginary_residual(const ThermoState& ts, const QuadratureGrid& grid,
                                  const WeightEvaluator& ev) {
    ts.validate();
    grid.validate();
    require_supported_layout(ts, ev, 1);
    ResidualReport rep;
    if (ts.d > 1 && !ev.separable()) {
        const Axis P = make_axis(grid.limit_p, grid.nodes_per_axis, grid.rule, grid.shift_p);
        const Axis Q = make_axis(grid.limit_q, grid.nodes_per_axis, grid.rule, grid.shift_q);
        const long long n = grid.nodes_per_axis;
        Sum2 s = reduce_blocks<Sum2>(n, [&](long long i1) {
            return pairwise_sum<Sum2>(0, n * n * n, [&](long long rest) {
                const long long j1 = rest / (n * n);
                const long long i2 = (rest / n) % n;
                const long long j2 = rest % n;
                PhasePoint pt;
                pt.d = 2;
                pt.p = {P.x[i1], P.x[i2], 0.0};
                pt.q = {Q.x[j1], Q.x[j2], 0.0};
                const double w = P.w[i1] * Q.w[j1] * P.w[i2] * Q.w[j2];
                Complex v = w * ev.weighted(pt, ts.beta);
                return Sum2{Complex(v.imag(), 0.0), Complex(std::abs(v), 0.0)};
            });
        });
        rep.residual = ts.z * norm_scale_2pi(2) * s.a.real();
        rep.abs_scale = ts.z * norm_scale_2pi(2) * s.b.real();
        return rep;
    }

    DimTables t = build_tables(grid, ev, ts.beta, EnergyKind::none);
    const long long n = grid.nodes_per_axis;
    // product over dimensions stays complex; the residual is its imaginary part
    Sum2 s = reduce_blocks<Sum2>(n, [&](long long i) {
        return pairwise_sum<Sum2>(0, n, [&](long long j) {
            const Complex f = t.F[i * n + j];
            return Sum2{f, Complex(std::abs(f), 0.0)};
        });
    });
    Complex M = s.a * norm_scale_2pi(1);
    double scale1 = s.b.real() * norm_scale_2pi(1);
    Complex prod = 1.0;
    double scale = 1.0;
    for (int a = 0; a < ts.d; ++a) {
        prod *= M;
        scale *= scale1;
    }
    rep.residual = ts.z * prod.imag();
    rep.abs_scale = ts.z * scale;
    return rep;
}

// --- Monte Carlo -------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct McAccum {
    double sum = 0.0;
    long long n = 0;
};

// One chunk of the loop estimator. Returns the chunk sum of per-sample
// values for the grand potential (and the energy variant when requested).
template <typename ValueFn>
McAccum run_chunk(std::uint64_t seed, int chunk, long long chunk_samples, int l, int d, double sigma,
                  ValueFn&& value_of) {
    std::mt19937_64 eng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk) + 1)));
    std::normal_distribution<double> normal(0.0, sigma);
    McAccum acc;
    std::vector<PhasePoint> pts(l);
    for (long long s = 0; s < chunk_samples; ++s) {
        for (int j = 0; j < l; ++j) {
            pts[j].d = d;
            for (int a = 0; a < d; ++a) {
                pts[j].p[a] = normal(eng);
                pts[j].q[a] = normal(eng);
            }
        }
        acc.sum += value_of(pts);
        acc.n += 1;
    }
    return acc;
}

struct McPlan {
    int chunks;
    long long per_chunk;
};

McPlan plan_chunks(long long samples) {
    const int chunks = static_cast<int>(std::min<long long>(100, samples));
    return {chunks, (samples + chunks - 1) / chunks};
}

McEstimate mc_reduce(const McSampler& sampler, int l, int d, double sigma,
                     const std::function<double(const std::vector<PhasePoint>&)>& value_of) {
    const McPlan plan = plan_chunks(sampler.samples);
    std::vector<double> means(plan.chunks);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min<int>(worker_count(), plan.chunks);
    auto work = [&] {
        for (int c = next.fetch_add(1); c < plan.chunks; c = next.fetch_add(1)) {
            McAccum acc = run_chunk(sampler.seed, c, plan.per_chunk, l, d, sigma, value_of);
            means[c] = acc.sum / acc.n;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    const double mean = pairwise_sum<double>(0, plan.chunks, [&](long long c) { return means[c]; }) /
                        plan.chunks;
    double var = 0.0;
    if (plan.chunks > 1) {
        var = pairwise_sum<double>(0, plan.chunks, [&](long long c) {
                  const double dlt = means[c] - mean;
                  return dlt * dlt;
              }) /
              (static_cast<double>(plan.chunks) * (plan.chunks - 1));
    }
    return {mean, std::sqrt(var)};
}

}  // namespace

McEstimate mc_loop_grand_potential(int l, const ThermoState& ts, const McSampler& sampler,
                                   const CutoffPolicy& pol, const WeightEvaluator& ev,
                                   bool force_unit_phase) {
    ts.validate();
    sampler.validate();
    pol.validate();
    if (l < 2) throw std::invalid_argument("the sampler covers loop orders l >= 2");

    const int d = ts.d;
    const double sigma = sampler.proposal_width / std::sqrt(ts.beta);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double prefactor =
        sign_pow(ts.sign, l) * std::pow(ts.z, l) / l * std::pow(sigma * sigma, l * d);

    auto value_of = [&](const std::vector<PhasePoint>& pts) {
        LoopConfiguration loop{pts, +1};
        if (pol.active() && !cutoff_accept(loop, pol)) return 0.0;
        double norm2 = 0.0;
        Complex prod = 1.0;
        for (const auto& pt : pts) {
            norm2 += pt.p_sq() + pt.q_sq();
            prod *= ev.weighted(pt, ts.beta);
        }
        if (!force_unit_phase) prod *= eta_loop(loop);
        return prefactor * std::exp(norm2 * inv2s2) * prod.real();
    };
    return mc_reduce(sampler, l, d, sigma, value_of);
}

namespace {

McEstimate mc_loop_energy(int l, const ThermoState& ts, const McSampler& sampler,
                          const CutoffPolicy& pol, const WeightEvaluator& ev, bool use_wh) {
    const int d = ts.d;
    const double sigma = sampler.proposal_width / std::sqrt(ts.beta);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double prefactor =
        sign_pow(ts.sign, l) * std::pow(ts.z, l) / l * std::pow(sigma * sigma, l * d);

    auto value_of = [&](const std::vector<PhasePoint>& pts) {
        LoopConfiguration loop{pts, +1};
        if (pol.active() && !cutoff_accept(loop, pol)) return 0.0;
        double norm2 = 0.0;
        for (const auto& pt : pts) norm2 += pt.p_sq() + pt.q_sq();

        Complex total = 0.0;
        if (use_wh) {
            // sum over which particle carries the energy-weighted factor
            std::vector<Complex> plain(pts.size());
            for (size_t j = 0; j < pts.size(); ++j) plain[j] = ev.weighted(pts[j], ts.beta);
            for (size_t k = 0; k < pts.size(); ++k) {
                Complex term = ev.weighted_energy(pts[k], ts.beta);
                for (size_t j = 0; j < pts.size(); ++j)
                    if (j != k) term *= plain[j];
                total += term;
            }
        } else {
            Complex prod = 1.0;
            double hsum = 0.0;
            for (const auto& pt : pts) {
                prod *= ev.weighted(pt, ts.beta);
                hsum += pt.energy();
            }
            total = prod * hsum;
        }
        total *= eta_loop(loop);
        return prefactor * std::exp(norm2 * inv2s2) * total.real();
    };
    return mc_reduce(sampler, l, d, sigma, value_of);
}

}  // namespace

double average_energy_loops(int l_max, const ThermoState& ts, const QuadratureGrid& monomer_grid,
                            const QuadratureGrid& dimer_grid, const CutoffPolicy& pol,
                            const WeightEvaluator& ev, bool use_wh, const McSampler* sampler) {
    ts.validate();
    pol.validate();
    if (l_max < 1) throw std::invalid_argument("loop order must be >= 1");
    if (use_wh && !ev.supports_energy_series())
        throw UnsupportedError("use_wh requires the exact series method");
    if (l_max > 2 && sampler == nullptr)
        throw std::invalid_argument("loop orders beyond the dimer need an importance sampler");
    require_supported_layout(ts, ev, std::min(l_max, 2));

    const EnergyKind ekind = use_wh ? EnergyKind::wh_series : EnergyKind::bare_h;
    double total = 0.0;

    // monomer
    if (ts.d > 1 && !ev.separable()) {
        Sum2 s = monomer_full_2d(ts, monomer_grid, ev, ekind);
        total += ts.z * norm_scale_2pi(2) * s.b.real();
    } else {
        DimTables t = build_tables(monomer_grid, ev, ts.beta, ekind);
        Sum2 s = monomer_reduce(t);
        const Complex M = s.a * norm_scale_2pi(1);
        const Complex G = s.b * norm_scale_2pi(1);
        Complex Mpow = 1.0;
        for (int a = 0; a < ts.d - 1; ++a) Mpow *= M;
        total += ts.z * (static_cast<double>(ts.d) * G * Mpow).real();
    }

    // dimer
    if (l_max >= 2) {
        DimTables t = build_tables(dimer_grid, ev, ts.beta, ekind);
        Sum2 s = dimer_reduce(t, pol);
        const Complex D = s.a * norm_scale_2pi(2);
        const Complex E = s.b * norm_scale_2pi(2);
        Complex Dpow = 1.0;
        for (int a = 0; a < ts.d - 1; ++a) Dpow *= D;
        total += sign_pow(ts.sign, 2) * 0.5 * ts.z * ts.z *
                 (static_cast<double>(ts.d) * E * Dpow).real();
    }

    for (int l = 3; l <= l_max; ++l)
        total += mc_loop_energy(l, ts, *sampler, pol, ev, use_wh).estimate;
    return total;
}

}  // namespace qsm

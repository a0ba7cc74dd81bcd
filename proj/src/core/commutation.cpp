#include "commutation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "hermite.hpp"

namespace qsm {

namespace {

constexpr Complex I{0.0, 1.0};

Complex ipow(int n) {
    switch (n & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

void check_beta(double beta) {
    if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
}

// Walks the 1-D series with running phi recurrences at P and Q. The
// energy flag inserts the (n + 1/2) factor. Terms first grow towards the
// classical turning points 2n + 1 ~ P^2, Q^2 before they decay, so the
// early-out (three consecutive terms below tail_tol) only arms once n has
// passed both turning points; otherwise the walk would quit inside the
// exponentially small head at large coordinates.
Complex series_walk(double P, double Q, double beta, const SeriesTruncation& tr, bool energy) {
    tr.validate();
    const double root2pi = std::sqrt(two_pi);
    const double decay = std::exp(-beta);
    double boltz = std::exp(-0.5 * beta);  // e^{-beta(n+1/2)} at n = 0
    const double turn = 0.5 * (std::max(P * P, Q * Q) - 1.0);

    double fP_m = 0.0, fP = hermite_function(0, P);
    double fQ_m = 0.0, fQ = hermite_function(0, Q);

    Complex sum = 0.0;
    int quiet = 0;
    for (int n = 0; n <= tr.n_max; ++n) {
        double mag = root2pi * fP * fQ * boltz;
        double weighted = energy ? mag * (n + 0.5) : mag;
        sum += ipow(n) * weighted;
        if (n > turn && std::abs(weighted) < tr.tail_tol) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        // advance phi_{n} -> phi_{n+1} at both arguments
        double fP_p = P * std::sqrt(2.0 / (n + 1)) * fP - std::sqrt(double(n) / (n + 1)) * fP_m;
        double fQ_p = Q * std::sqrt(2.0 / (n + 1)) * fQ - std::sqrt(double(n) / (n + 1)) * fQ_m;
        fP_m = fP;
        fP = fP_p;
        fQ_m = fQ;
        fQ = fQ_p;
        boltz *= decay;
    }
    return sum;
}

}  // namespace

Complex series_term_1d(int n, double P, double Q, double beta) {
    check_beta(beta);
    return ipow(n) * (std::sqrt(two_pi) * hermite_function(n, P) * hermite_function(n, Q) *
                      std::exp(-beta * (n + 0.5)));
}

Complex series_sum_1d(double P, double Q, double beta, const SeriesTruncation& tr) {
    check_beta(beta);
    return series_walk(P, Q, beta, tr, false);
}

Complex energy_series_sum_1d(double P, double Q, double beta, const SeriesTruncation& tr) {
    check_beta(beta);
    return series_walk(P, Q, beta, tr, true);
}

Complex weighted_w_energy_series(const PhasePoint& pt, double beta, const SeriesTruncation& tr) {
    pt.validate();
    check_beta(beta);
    Complex prod = 1.0;
    for (int a = 0; a < pt.d; ++a)
        prod *= std::polar(1.0, -pt.q[a] * pt.p[a]) * series_walk(pt.p[a], pt.q[a], beta, tr, false);
    return prod;
}

Complex weighted_wh_energy_series(const PhasePoint& pt, double beta, const SeriesTruncation& tr) {
    pt.validate();
    check_beta(beta);
    std::array<Complex, max_dim> plain, ew;
    for (int a = 0; a < pt.d; ++a) {
        Complex phase = std::polar(1.0, -pt.q[a] * pt.p[a]);
        plain[a] = phase * series_walk(pt.p[a], pt.q[a], beta, tr, false);
        ew[a] = phase * series_walk(pt.p[a], pt.q[a], beta, tr, true);
    }
    Complex sum = 0.0;
    for (int a = 0; a < pt.d; ++a) {
        Complex term = ew[a];
        for (int b = 0; b < pt.d; ++b)
            if (b != a) term *= plain[b];
        sum += term;
    }
    return sum;
}

Complex w_big_expansion(const PhasePoint& pt, double beta, int order) {
    pt.validate();
    check_beta(beta);
    if (order < 0 || order > 5) throw std::invalid_argument("big-W closed forms cover orders 0..5");
    const double d = pt.d;
    const double P2 = pt.p_sq();
    const double Q2 = pt.q_sq();
    const double R = pt.p_dot_q();

    std::array<Complex, 6> Wn{};
    Wn[0] = 1.0;
    Wn[1] = 0.0;
    Wn[2] = Complex(-d / 4.0, -R / 2.0);
    Wn[3] = (P2 + Q2) / 6.0;
    Wn[4] = Complex((3.0 * d * d + 4.0 * d) / 96.0 - R * R / 8.0, (3.0 * d + 5.0) * R / 24.0);
    Wn[5] = Complex(-(5.0 * d + 8.0) * (P2 + Q2) / 120.0, -R * (P2 + Q2) / 12.0);

    Complex sum = 0.0;
    double bp = 1.0;
    for (int n = 0; n <= order; ++n, bp *= beta) sum += Wn[n] * bp;
    return sum;
}

Complex w_small_expansion(const PhasePoint& pt, double beta, int order) {
    pt.validate();
    check_beta(beta);
    if (order < 1 || order > 4) throw std::invalid_argument("small-w oscillator terms cover orders 1..4");
    const double d = pt.d;
    const double P2 = pt.p_sq();
    const double Q2 = pt.q_sq();
    const double R = pt.p_dot_q();
    const double b2 = beta * beta, b3 = b2 * beta, b4 = b3 * beta, b5 = b4 * beta;

    Complex w = -I * (b2 * R / 2.0);
    if (order >= 2) w += b3 * (P2 + Q2) / 6.0 - d * b2 / 4.0;
    if (order >= 3) w += I * (5.0 * b4 * R / 24.0);
    if (order >= 4) w += -b5 * (P2 + Q2) / 15.0 + d * b4 / 24.0;
    return std::exp(w);
}

// --- symbolic recursion ------------------------------------------------------

namespace {

void add_monomial(MonomialPoly& poly, MonomialKey k, Complex coeff) {
    if (coeff == Complex{}) return;
    auto [it, inserted] = poly.try_emplace(k, coeff);
    if (!inserted) {
        it->second += coeff;
        if (std::abs(it->second) < 1e-15) poly.erase(it);
    }
}

}  // namespace

ShoRecursionTable::ShoRecursionTable(int n_max) {
    if (n_max < 0 || n_max > 12) throw std::invalid_argument("recursion table supports n_max in [0, 12]");
    levels_.resize(n_max + 1);
    add_monomial(levels_[0], {}, 1.0);
    // levels_[1] stays empty (W_1 = 0)
    for (int m = 2; m <= n_max; ++m) {
        MonomialPoly& out = levels_[m];
        const double inv = 1.0 / m;

        for (const auto& [k, c] : levels_[m - 1]) {
            // lap W / (2m): Q^2 exponent down, with the d-producing trace part
            if (k.b >= 1) {
                add_monomial(out, {k.a, k.b - 1, k.c, k.e}, c * (0.5 * inv * (4.0 * k.b * (k.b - 1) + 4.0 * k.b * k.c)));
                add_monomial(out, {k.a, k.b - 1, k.c, k.e + 1}, c * (0.5 * inv * 2.0 * k.b));
            }
            if (k.c >= 2)
                add_monomial(out, {k.a + 1, k.b, k.c - 2, k.e}, c * (0.5 * inv * k.c * (k.c - 1)));
            // i P.grad W / m
            if (k.b >= 1) add_monomial(out, {k.a, k.b - 1, k.c + 1, k.e}, c * I * (inv * 2.0 * k.b));
            if (k.c >= 1) add_monomial(out, {k.a + 1, k.b, k.c - 1, k.e}, c * I * (inv * k.c));
        }
        for (const auto& [k, c] : levels_[m - 2]) {
            add_monomial(out, {k.a, k.b, k.c, k.e + 1}, c * (-0.5 * inv));          // -d W / (2m)
            add_monomial(out, {k.a, k.b, k.c, k.e}, c * (-inv * (2.0 * k.b + k.c)));  // -Q.grad W / m
            add_monomial(out, {k.a, k.b, k.c + 1, k.e}, c * (-I * inv));            // -i R W / m
        }
        if (m >= 3)
            for (const auto& [k, c] : levels_[m - 3])
                add_monomial(out, {k.a, k.b + 1, k.c, k.e}, c * (0.5 * inv));  // Q^2 W / (2m)
    }
}

const MonomialPoly& ShoRecursionTable::coefficients(int n) const {
    if (n < 0 || n > order()) throw std::invalid_argument("recursion level out of range");
    return levels_[n];
}

Complex ShoRecursionTable::evaluate(const PhasePoint& pt, double beta) const {
    pt.validate();
    check_beta(beta);
    const double P2 = pt.p_sq(), Q2 = pt.q_sq(), R = pt.p_dot_q(), d = pt.d;
    Complex sum = 0.0;
    double bp = 1.0;
    for (const auto& level : levels_) {
        Complex v = 0.0;
        for (const auto& [k, c] : level)
            v += c * std::pow(P2, k.a) * std::pow(Q2, k.b) * std::pow(R, k.c) * std::pow(d, k.e);
        sum += v * bp;
        bp *= beta;
    }
    return sum;
}

// --- general potential small-w ----------------------------------------------

Complex w_general_small(const DerivativeBundle& derivs, std::span<const double> p,
                        std::span<const double> q, double beta, int order, double mass) {
    if (order < 1 || order > 4) throw std::invalid_argument("general small-w covers orders 1..4");
    if (p.size() != q.size() || p.empty()) throw std::invalid_argument("p and q must have equal nonzero size");
    if (!(mass > 0)) throw std::invalid_argument("mass must be positive");
    check_beta(beta);
    const size_t n = p.size();

    if (!derivs.gradient) throw std::invalid_argument("order 1 requires a gradient callback");
    if (order >= 2 && !derivs.hessian) throw std::invalid_argument("order 2 requires a hessian callback");
    if (order >= 3 && !derivs.third) throw std::invalid_argument("order 3 requires a third-derivative callback");
    if (order >= 4 && !derivs.fourth) throw std::invalid_argument("order 4 requires a fourth-derivative callback");

    const double m = mass;
    const double b2 = beta * beta, b3 = b2 * beta, b4 = b3 * beta, b5 = b4 * beta;

    std::vector<double> g = derivs.gradient(q);
    if (g.size() != n) throw std::invalid_argument("gradient callback returned wrong size");

    double pg = 0;
    for (size_t a = 0; a < n; ++a) pg += p[a] * g[a];

    Complex w = -I * (b2 / (2.0 * m)) * pg;
    if (order == 1) return std::exp(w);

    std::vector<double> H = derivs.hessian(q);
    if (H.size() != n * n) throw std::invalid_argument("hessian callback returned wrong size");

    double pHp = 0, gg = 0, trH = 0, pHg = 0, gHg = 0, HpHp = 0, frobH = 0;
    {
        std::vector<double> Hp(n, 0.0), Hg(n, 0.0);
        for (size_t a = 0; a < n; ++a) {
            gg += g[a] * g[a];
            trH += H[a * n + a];
            for (size_t b = 0; b < n; ++b) {
                Hp[a] += H[a * n + b] * p[b];
                Hg[a] += H[a * n + b] * g[b];
                frobH += H[a * n + b] * H[a * n + b];
            }
        }
        for (size_t a = 0; a < n; ++a) {
            pHp += p[a] * Hp[a];
            pHg += p[a] * Hg[a];
            gHg += g[a] * Hg[a];
            HpHp += Hp[a] * Hp[a];
        }
    }

    w += b3 / (6.0 * m * m) * pHp + (1.0 / (2.0 * m)) * (b3 / 3.0 * gg - b2 / 2.0 * trH);
    if (order == 2) return std::exp(w);

    std::vector<double> T = derivs.third(q);
    if (T.size() != n * n * n) throw std::invalid_argument("third-derivative callback returned wrong size");
    auto t3 = [&](size_t a, size_t b, size_t c) { return T[(a * n + b) * n + c]; };

    double pppT = 0, ppgT = 0;
    std::vector<double> gradLap(n, 0.0);  // d/dq_a of laplacian U
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            gradLap[a] += t3(a, b, b);
            for (size_t c = 0; c < n; ++c) {
                pppT += t3(a, b, c) * p[a] * p[b] * p[c];
                ppgT += t3(a, b, c) * p[a] * p[b] * g[c];
            }
        }
    }
    double pGradLap = 0, gGradLap = 0;
    for (size_t a = 0; a < n; ++a) {
        pGradLap += p[a] * gradLap[a];
        gGradLap += g[a] * gradLap[a];
    }

    w += I * (b4 / (24.0 * m * m * m) * pppT + 5.0 * b4 / (24.0 * m * m) * pHg -
              b3 / (6.0 * m * m) * pGradLap);
    if (order == 3) return std::exp(w);

    std::vector<double> F = derivs.fourth(q);
    if (F.size() != n * n * n * n) throw std::invalid_argument("fourth-derivative callback returned wrong size");
    auto f4 = [&](size_t a, size_t b, size_t c, size_t e) { return F[((a * n + b) * n + c) * n + e]; };

    double ppppF = 0, ppLapF = 0, lapLapF = 0;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            lapLapF += f4(a, a, b, b);
            double s = 0;
            for (size_t c = 0; c < n; ++c) s += f4(a, b, c, c);
            ppLapF += p[a] * p[b] * s;
            for (size_t c = 0; c < n; ++c)
                for (size_t e = 0; e < n; ++e) ppppF += f4(a, b, c, e) * p[a] * p[b] * p[c] * p[e];
        }

    const double m2 = m * m, m3 = m2 * m, m4 = m3 * m;
    w += -b5 / (120.0 * m4) * ppppF + b4 / (16.0 * m3) * ppLapF - b5 / (15.0 * m3) * HpHp -
         3.0 * b5 / (40.0 * m3) * ppgT - b3 / (24.0 * m2) * lapLapF + 5.0 * b4 / (48.0 * m2) * gGradLap +
         b4 / (24.0 * m2) * frobH - b5 / (15.0 * m2) * gHg;
    return std::exp(w);
}

// --- WeightEvaluator ----------------------------------------------------------

WeightEvaluator WeightEvaluator::exact_series(SeriesTruncation tr) {
    tr.validate();
    WeightEvaluator ev;
    ev.method_ = WMethod::exact;
    ev.trunc_ = tr;
    return ev;
}

WeightEvaluator WeightEvaluator::big_w(int order) {
    if (order < 0 || order > 5) throw std::invalid_argument("big-W closed forms cover orders 0..5");
    WeightEvaluator ev;
    ev.method_ = WMethod::big_w;
    ev.order_ = order;
    return ev;
}

WeightEvaluator WeightEvaluator::small_w(int order) {
    if (order < 1 || order > 4) throw std::invalid_argument("small-w oscillator terms cover orders 1..4");
    WeightEvaluator ev;
    ev.method_ = WMethod::small_w;
    ev.order_ = order;
    return ev;
}

WeightEvaluator WeightEvaluator::sho_recursion(int n_max) {
    WeightEvaluator ev;
    ev.method_ = WMethod::sho_recursion;
    ev.order_ = n_max;
    ev.table_ = std::make_shared<ShoRecursionTable>(n_max);
    return ev;
}

Complex WeightEvaluator::weighted(const PhasePoint& pt, double beta) const {
    switch (method_) {
        case WMethod::exact:
            return weighted_w_energy_series(pt, beta, trunc_);
        case WMethod::big_w:
            return std::exp(-beta * pt.energy()) * w_big_expansion(pt, beta, order_);
        case WMethod::small_w:
            return std::exp(-beta * pt.energy()) * w_small_expansion(pt, beta, order_);
        case WMethod::sho_recursion:
            return std::exp(-beta * pt.energy()) * table_->evaluate(pt, beta);
    }
    throw std::logic_error("unreachable");
}

Complex WeightEvaluator::weighted_1d(double P, double Q, double beta) const {
    return weighted(PhasePoint(P, Q), beta);
}

Complex WeightEvaluator::weighted_energy(const PhasePoint& pt, double beta) const {
    if (!supports_energy_series())
        throw UnsupportedError("energy-weighted series is available for the exact method only");
    return weighted_wh_energy_series(pt, beta, trunc_);
}

Complex WeightEvaluator::weighted_energy_1d(double P, double Q, double beta) const {
    return weighted_energy(PhasePoint(P, Q), beta);
}

}  // namespace qsm

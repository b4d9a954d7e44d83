#include "exec/policy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "exec/error.hpp"

namespace optexec {

const char* to_string(BoundaryShape shape) {
    switch (shape) {
        case BoundaryShape::non_increasing: return "non-increasing";
        case BoundaryShape::non_decreasing: return "non-decreasing";
        case BoundaryShape::mixed: return "mixed";
    }
    return "?";
}

PolicyEvaluation optimal_controls(const ValueCoefficients& coeffs, const ModelParams& m,
                                  const PenaltyParams& p, double t, double x) {
    PolicyEvaluation out;
    out.t = t;
    out.x = x;

    const double a = coeffs.a(t);
    const double b = coeffs.b(t);
    if (!second_order_condition(a, m, p))
        throw Error(ErrorKind::solver, "optimal_controls: second-order condition fails at t");

    const double vxx = 2.0 * a;
    const double f = vxx * x + b + m.eta0;  // V_x + eta0
    const double psi = m.m1 * m.m1 * (vxx + m.gamma);
    const double n = m.m0 * m.m1 * (vxx + m.gamma) + m.rho * m.sigma * m.m1;
    const double delta =
        (2.0 * m.eta1 + 2.0 * p.beta1) * (2.0 * m.eta2 + 2.0 * p.beta2 - psi) -
        (m.eta1 + m.eta2 - p.alpha) * (m.eta1 + m.eta2 - p.alpha);
    const double C = compute_C(m, p);
    if (!(delta > 1e-12 * 2.0 * (m.eta1 + p.beta1) * std::max(std::abs(C), 1e-300)))
        throw Error(ErrorKind::solver, "optimal_controls: degenerate Hessian (delta ~ 0)");

    out.psi = psi;
    out.delta = delta;
    out.v_star = ((psi + m.eta1 - m.eta2 - 2.0 * p.beta2 - p.alpha) * f -
                  (m.eta1 + m.eta2 - p.alpha) * n) /
                 delta;
    out.l_star = ((m.eta2 - m.eta1 - p.alpha - 2.0 * p.beta1) * f +
                  2.0 * (m.eta1 + p.beta1) * n) /
                 delta;
    out.cap_exceeded_v = out.v_star * out.v_star > p.R1;
    out.cap_exceeded_l = out.l_star * out.l_star > p.R2;

    if (m.m1 == 0.0 && a < 0.0) {
        const bool v_coef_neg = m.eta1 - m.eta2 - 2.0 * p.beta2 - p.alpha < 0.0;
        const bool l_coef_neg = m.eta2 - m.eta1 - p.alpha - 2.0 * p.beta1 < 0.0;
        if (v_coef_neg && l_coef_neg) out.boundary = -(b + m.eta0) / vxx;
    }
    return out;
}

namespace {

struct BoundaryContext {
    double e1b1, sum_ab, E, C, tc, two_bg, n0, mu, eta0, T;

    BoundaryContext(const ModelParams& m, const PenaltyParams& p, NoiseSource noise) {
        e1b1 = m.eta1 + p.beta1;
        sum_ab = p.alpha + p.beta1 + p.beta2;
        E = m.eta2 - m.eta1 - p.alpha - 2.0 * p.beta1;
        C = compute_C(m, p);
        tc = t_crit(m, p);
        two_bg = 2.0 * p.beta - m.gamma;
        n0 = m.rho * m.sigma * (noise == NoiseSource::m0 ? m.m0 : m.m1);  // m1 = 0 here
        mu = m.mu;
        eta0 = m.eta0;
        T = m.T;
    }

    double P(double t) const {
        return sum_ab * mu / (2.0 * e1b1 * C) * ((tc - t) * (tc - t) - (tc - T) * (tc - T)) -
               E * n0 * (T - t) / (2.0 * e1b1 * C) + eta0 / two_bg;
    }

    double dP(double t) const {
        return -(tc - t) * sum_ab * mu / (e1b1 * C) + E * n0 / (2.0 * e1b1 * C);
    }
};

void check_boundary_pre(const ModelParams& m, const PenaltyParams& p, bool* relaxed) {
    if (m.m1 != 0.0)
        throw Error(ErrorKind::invalid, "buy-sell boundary: constant uncertainty (m1 = 0) only");
    require_valid(m, p, UncertaintyMode::constant);
    *relaxed = m.eta1 != m.eta2;
    if (*relaxed) {
        const bool ok = (m.eta1 - m.eta2 < 2.0 * p.beta2 + p.alpha) &&
                        (m.eta2 - m.eta1 < 2.0 * p.beta1 + p.alpha);
        if (!ok)
            throw Error(ErrorKind::validity,
                        "buy-sell boundary: with eta1 != eta2 both rate coefficients must stay "
                        "negative (|eta1-eta2| too large relative to the multipliers)");
    }
}

}  // namespace

double boundary_value(const ModelParams& m, const PenaltyParams& p, double t, NoiseSource noise) {
    bool relaxed = false;
    check_boundary_pre(m, p, &relaxed);
    return BoundaryContext(m, p, noise).P(t);
}

std::string BoundaryProfile::to_csv() const {
    std::string out = "t,P\n";
    char line[64];
    for (size_t i = 0; i < t.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", t[i], P[i]);
        out += line;
    }
    return out;
}

BoundaryProfile buy_sell_boundary(const ModelParams& m, const PenaltyParams& p, int grid_size,
                                  NoiseSource noise) {
    bool relaxed = false;
    check_boundary_pre(m, p, &relaxed);
    if (grid_size < 1) throw Error(ErrorKind::invalid, "buy_sell_boundary: grid_size >= 1");

    const BoundaryContext ctx(m, p, noise);
    BoundaryProfile out;
    out.relaxed_regime = relaxed;
    out.terminal_target = m.eta0 / ctx.two_bg;
    out.t.resize(static_cast<size_t>(grid_size) + 1);
    out.P.resize(out.t.size());
    const double h = m.T / grid_size;
    for (int i = 0; i <= grid_size; ++i) {
        const double t = std::min(m.T, i * h);
        out.t[static_cast<size_t>(i)] = t;
        out.P[static_cast<size_t>(i)] = ctx.P(t);
    }
    out.P.back() = out.terminal_target;  // exact, the time-dependent terms vanish at T
    out.classification = classify_boundary_monotonicity(m, p, noise).classification;
    return out;
}

BoundaryMonotonicity classify_boundary_monotonicity(const ModelParams& m, const PenaltyParams& p,
                                                    NoiseSource noise) {
    bool relaxed = false;
    check_boundary_pre(m, p, &relaxed);
    const BoundaryContext ctx(m, p, noise);
    BoundaryMonotonicity out;

    if (ctx.mu == 0.0) {
        // P is linear: slope E*n0 / (2(eta1+beta1)C), increasing under adverse
        // selection (rho*m0 < 0) in the usual E < 0 setting.
        const double slope = ctx.dP(0.0);
        out.classification = slope > 0.0   ? BoundaryShape::non_decreasing
                             : slope < 0.0 ? BoundaryShape::non_increasing
                                           : BoundaryShape::non_increasing;  // flat: both hold
        return out;
    }

    // P'(t) is linear in t and vanishes at the flip time.
    const double t_flip = ctx.tc - ctx.E * ctx.n0 / (2.0 * ctx.sum_ab * ctx.mu);
    out.flip_time = t_flip;
    if (ctx.mu > 0.0) {
        // P' increasing in t: non-increasing on [0,T] iff T <= t_flip.
        out.classification = (m.T <= t_flip)    ? BoundaryShape::non_increasing
                             : (t_flip <= 0.0)  ? BoundaryShape::non_decreasing
                                                : BoundaryShape::mixed;
    } else {
        out.classification = (m.T <= t_flip)    ? BoundaryShape::non_decreasing
                             : (t_flip <= 0.0)  ? BoundaryShape::non_increasing
                                                : BoundaryShape::mixed;
    }

    const double tilt = ctx.E * m.sigma * ctx.two_bg * m.m0;
    if (tilt != 0.0) {
        out.rho_threshold_non_increasing =
            std::abs(2.0 * ctx.e1b1 * ctx.C * ctx.mu / tilt);
        out.rho_threshold_non_decreasing = std::abs(
            (2.0 * ctx.e1b1 * ctx.C * ctx.mu + 2.0 * m.T * ctx.mu * ctx.sum_ab * ctx.two_bg) /
            tilt);
    }
    return out;
}

std::pair<double, double> infinite_uncertainty_policy(const ModelParams& m,
                                                      const PenaltyParams& p, double t,
                                                      double x) {
    const double e1b1 = m.eta1 + p.beta1;
    const double two_bg = 2.0 * p.beta - m.gamma;
    const double tt = m.T - t;
    const double a = -e1b1 * two_bg / (2.0 * e1b1 + tt * two_bg);
    const double b = -m.eta0 - a * (2.0 * m.eta0 / two_bg + 2.0 * m.mu * tt / two_bg +
                                    m.mu * tt * tt / (2.0 * e1b1));
    const double v = -(2.0 * a * x + b + m.eta0) / (2.0 * e1b1);
    return {v, 0.0};
}

}  // namespace optexec

#include "exec/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "exec/error.hpp"

namespace optexec {

double default_speed_cap(const ModelParams& model) {
    const double r = model.x0 / model.T;
    return r * r;
}

const char* to_string(UncertaintyMode mode) {
    switch (mode) {
        case UncertaintyMode::constant: return "constant";
        case UncertaintyMode::linear: return "linear";
        case UncertaintyMode::affine: return "affine";
        case UncertaintyMode::none: return "none";
        case UncertaintyMode::infinite_limit: return "infinite-limit";
    }
    return "?";
}

const char* to_string(NoiseSource src) {
    return src == NoiseSource::m0 ? "m0" : "m1";
}

double cross_term_K(const ModelParams& m, const PenaltyParams& p) {
    return m.eta1 * m.eta2 + p.beta1 * p.beta2 + m.eta1 * p.beta2 + m.eta2 * p.beta1;
}

double compute_C(const ModelParams& m, const PenaltyParams& p) {
    const double K = cross_term_K(m, p);
    const double d = m.eta1 + m.eta2 - p.alpha;
    return (4.0 * K - d * d) / (2.0 * (m.eta1 + p.beta1));
}

AlphaInterval admissible_alpha_interval(const ModelParams& m, const PenaltyParams& p) {
    const double w = 2.0 * std::sqrt(cross_term_K(m, p));
    return {m.eta1 + m.eta2 - w, m.eta1 + m.eta2 + w};
}

bool second_order_condition(double a_value, const ModelParams& m, const PenaltyParams& p) {
    const double C = compute_C(m, p);
    return 2.0 * m.m1 * m.m1 * a_value < C - m.gamma * m.m1 * m.m1;
}

double t_crit(const ModelParams& m, const PenaltyParams& p) {
    if (m.m1 != 0.0)
        throw Error(ErrorKind::invalid, "t_crit: defined for constant uncertainty (m1 = 0) only");
    if (!(p.beta > m.gamma / 2.0))
        throw Error(ErrorKind::validity,
                    "t_crit: non-liquidation penalty too weak (beta <= gamma/2), "
                    "the Riccati blow-up would precede the horizon");
    const double C = compute_C(m, p);
    return m.T + (m.eta1 + p.beta1) * C / ((p.alpha + p.beta1 + p.beta2) * (2.0 * p.beta - m.gamma));
}

HorizonBound t_max(const ModelParams& m, const PenaltyParams& p) {
    if (m.m1 <= 0.0)
        throw Error(ErrorKind::invalid, "t_max: requires linear/affine uncertainty (m1 > 0)");
    if (!(p.beta > m.gamma / 2.0))
        throw Error(ErrorKind::validity, "t_max: requires beta > gamma/2");
    const double C = compute_C(m, p);
    const double gm2 = m.gamma * m.m1 * m.m1;
    if (C >= gm2) return {true, std::numeric_limits<double>::infinity()};
    const double e1b1 = m.eta1 + p.beta1;
    const double num = 4.0 * m.m1 * m.m1 * e1b1 * (p.beta - m.gamma) + 2.0 * e1b1 * C;
    const double den = (gm2 - C) * (2.0 * p.beta - m.gamma);
    return {false, num / den};
}

double beta_floor(const ModelParams& m, const PenaltyParams& p, double T) {
    if (m.m1 <= 0.0)
        throw Error(ErrorKind::invalid, "beta_floor: requires m1 > 0");
    const double C = compute_C(m, p);
    const double gm2 = m.gamma * m.m1 * m.m1;
    const double e1b1 = m.eta1 + p.beta1;
    const double den = 2.0 * m.m1 * m.m1 * e1b1 + (C - gm2) * T;
    if (!(den > 0.0))
        throw Error(ErrorKind::validity,
                    "beta_floor: horizon and penalties jointly infeasible "
                    "(floor denominator non-positive)");
    const double bracket = (gm2 - C) * e1b1 / den;
    return m.gamma / 2.0 + std::max(bracket, 0.0);
}

double beta_floor_infinite(const ModelParams& m, const PenaltyParams& p, double T) {
    const double e1b1 = m.eta1 + p.beta1;
    const double den = 2.0 * e1b1 - m.gamma * T;
    if (!(den > 0.0))
        throw Error(ErrorKind::validity,
                    "beta_floor_infinite: horizon too long (2(eta1+beta1) <= gamma*T)");
    return m.gamma / 2.0 + std::max(m.gamma * e1b1 / den, 0.0);
}

PenaltyParams enforce_explicit_linear_condition(const ModelParams& m, const PenaltyParams& p) {
    // 2(alpha+beta1+beta2) = C(alpha) is quadratic in alpha with discriminant
    // identically zero, so the candidate is unique.
    const double alpha_star = m.eta2 - m.eta1 - 2.0 * p.beta1;
    PenaltyParams out = p;
    out.alpha = alpha_star;
    const double C = compute_C(m, out);
    if (alpha_star < 0.0 || C < 0.0) {
        std::ostringstream os;
        os << "enforce_explicit_linear_condition: root alpha = " << alpha_star
           << " gives C = " << C
           << "; adjust beta1/beta2 (needs eta2 + beta2 >= eta1 + beta1 and alpha >= 0)";
        throw Error(ErrorKind::validity, os.str());
    }
    return out;
}

DerivedConstants derive_constants(const ModelParams& m, const PenaltyParams& p) {
    DerivedConstants d;
    d.K = cross_term_K(m, p);
    d.C = compute_C(m, p);
    d.alpha_interval = admissible_alpha_interval(m, p);
    d.adverse_selection = m.adverse_selection();
    if (p.beta > m.gamma / 2.0) {
        if (m.m1 == 0.0) d.t_crit = t_crit(m, p);
        if (m.m1 > 0.0) {
            d.t_max = t_max(m, p);
            try {
                d.beta_floor = beta_floor(m, p, m.T);
            } catch (const Error&) {
                // denominator non-positive: leave unset, the T_max check reports it
            }
        }
    }
    return d;
}

namespace {

void push(ValidityReport& r, std::string name, bool pass, bool hard, double value, double bound,
          std::string note = {}) {
    r.checks.push_back({std::move(name), pass, hard, value, bound, std::move(note)});
}

}  // namespace

ValidityReport run_validity_checks(const ModelParams& m, const PenaltyParams& p,
                                   UncertaintyMode mode) {
    ValidityReport r;

    // Sign conventions of the model are advisory (degenerate values such as
    // sigma = 0 are legitimate for deterministic studies); hard checks are
    // reserved for conditions the solve genuinely needs.
    push(r, "sigma-positive", m.sigma > 0.0, false, m.sigma, 0.0);
    push(r, "gamma-positive", m.gamma > 0.0, false, m.gamma, 0.0);
    push(r, "eta1-positive", m.eta1 > 0.0, false, m.eta1, 0.0);
    push(r, "eta2-positive", m.eta2 > 0.0, false, m.eta2, 0.0);
    push(r, "eta0-nonnegative", m.eta0 >= 0.0, false, m.eta0, 0.0);
    push(r, "penalties-nonnegative",
         p.alpha >= 0.0 && p.beta1 >= 0.0 && p.beta2 >= 0.0 && p.R1 >= 0.0 && p.R2 >= 0.0, false,
         std::min({p.alpha, p.beta1, p.beta2, p.R1, p.R2}), 0.0);
    push(r, "horizon-positive", m.T > 0.0, true, m.T, 0.0);
    push(r, "rho-in-open-unit-interval", std::abs(m.rho) < 1.0, true, m.rho, 1.0);
    push(r, "eta1-beta1-positive", m.eta1 + p.beta1 > 0.0, true, m.eta1 + p.beta1, 0.0,
         "every coefficient formula divides by eta1 + beta1");

    // Declared mode must match the zero pattern of (m0, m1).
    bool mode_ok = true;
    std::string mode_note;
    switch (mode) {
        case UncertaintyMode::constant:
            mode_ok = m.m1 == 0.0;
            mode_note = "constant mode requires m1 = 0";
            break;
        case UncertaintyMode::linear:
            mode_ok = m.m0 == 0.0 && m.m1 > 0.0;
            mode_note = "linear mode requires m0 = 0, m1 > 0";
            break;
        case UncertaintyMode::none:
            mode_ok = m.m0 == 0.0 && m.m1 == 0.0;
            mode_note = "none mode requires m0 = m1 = 0";
            break;
        case UncertaintyMode::infinite_limit:
            mode_ok = m.m0 == 0.0;
            mode_note = "infinite-limit mode requires m0 = 0 (m1 is taken to the limit)";
            break;
        case UncertaintyMode::affine:
            break;
    }
    push(r, "mode-consistent", mode_ok, true, m.m0, m.m1, mode_note);

    push(r, "beta-above-gamma-half", p.beta > m.gamma / 2.0, true, p.beta, m.gamma / 2.0);

    const double C = compute_C(m, p);
    const auto iv = admissible_alpha_interval(m, p);
    const bool m1_zero = mode == UncertaintyMode::constant || mode == UncertaintyMode::none ||
                         (m.m1 == 0.0 && mode != UncertaintyMode::infinite_limit);
    // C > 0 (equivalently alpha inside the open interval) is the concavity
    // condition when m1 = 0. With m1 > 0 the binding check is on the solved
    // a(t); these two stay informational there.
    push(r, "C-positive", C > 0.0, m1_zero, C, 0.0);
    push(r, "alpha-in-admissible-interval", iv.contains(p.alpha), m1_zero, p.alpha, iv.hi,
         "interval (" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + ")");

    if (m1_zero && p.beta > m.gamma / 2.0 && m.m1 == 0.0) {
        const double tc = t_crit(m, p);
        push(r, "t-crit-beyond-horizon", tc > m.T, false, tc, m.T);
    }

    const bool limit_mode = mode == UncertaintyMode::infinite_limit;
    if (limit_mode) {
        try {
            const double floor = beta_floor_infinite(m, p, m.T);
            push(r, "beta-above-floor", p.beta > floor, true, p.beta, floor,
                 "infinite-uncertainty floor");
        } catch (const Error& e) {
            push(r, "beta-above-floor", false, true, p.beta, 0.0, e.what());
        }
    } else if (m.m1 > 0.0 && p.beta > m.gamma / 2.0) {
        const auto tm = t_max(m, p);
        push(r, "horizon-below-t-max", tm.unbounded || m.T < tm.value, true, m.T,
             tm.unbounded ? std::numeric_limits<double>::infinity() : tm.value,
             tm.unbounded ? "unbounded (C >= gamma*m1^2)" : "");
        if (m.m0 == 0.0) {
            try {
                const double floor = beta_floor(m, p, m.T);
                push(r, "beta-above-floor", p.beta > floor, false, p.beta, floor,
                     "equivalent restatement of the horizon bound");
            } catch (const Error& e) {
                push(r, "beta-above-floor", false, false, p.beta, 0.0, e.what());
            }
        }
    }

    push(r, "adverse-selection", m.adverse_selection(), false, m.rho * m.m0, 0.0,
         "diagnostic only, never enforced");

    return r;
}

void require_valid(const ModelParams& m, const PenaltyParams& p, UncertaintyMode mode) {
    const auto report = run_validity_checks(m, p, mode);
    if (!report.ok())
        throw Error(ErrorKind::validity, "validity check failed: " + report.first_failure());
}

}  // namespace optexec

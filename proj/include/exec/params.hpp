#pragma once

#include <optional>
#include <string>
#include <vector>

namespace optexec {

// Exogenous market/model parameters. Units follow the seconds-based
// convention used throughout: prices in $/share, positions in shares,
// rates in share/sec, time in seconds.
struct ModelParams {
    double mu = 0.0;     // stock drift, $/share/sec
    double sigma = 0.0;  // stock volatility, $/share/sec^0.5 (> 0)
    double gamma = 0.0;  // permanent impact coefficient, $/share^2 (> 0)
    double eta0 = 0.0;   // fixed temporary impact, $/share (>= 0)
    double eta1 = 0.0;   // market-order temporary impact, ($/share)/(share/sec) (> 0)
    double eta2 = 0.0;   // limit-order temporary impact, ($/share)/(share/sec) (> 0)
    double rho = 0.0;    // corr(fill noise, price noise), in (-1, 1)
    double m0 = 0.0;     // constant fill-uncertainty coefficient, share/sec^0.5
    double m1 = 0.0;     // linear fill-uncertainty coefficient, sec^0.5
    double T = 0.0;      // trading horizon, sec (> 0)
    double x0 = 0.0;     // initial position, shares
    double S0 = 0.0;     // initial price, $/share

    // m(L): diffusion coefficient of the limit-order fill noise.
    double fill_noise(double L) const { return m0 + m1 * L; }
    // h(v,L): temporary concession of the transacted price, affine in the rates.
    double temp_impact(double v, double L) const { return -eta0 - eta1 * v - eta2 * L; }

    // Adverse selection means rho*m(L) < 0 for every L >= 0, i.e. fills tend to
    // land just before the price moves against the trader. Diagnostic only; the
    // model is solvable either way.
    bool adverse_selection() const {
        const bool s0 = rho * m0 <= 0.0, s1 = rho * m1 <= 0.0;
        return s0 && s1 && (rho * m0 < 0.0 || rho * m1 < 0.0);
    }
};

// Endogenous Lagrange multipliers and penalty coefficients.
struct PenaltyParams {
    double alpha = 0.0;  // trade director: running penalty on v*L (>= 0)
    double beta = 0.0;   // non-liquidation terminal penalty -beta*x_T^2, $/share^2
    double beta1 = 0.0;  // market-order speed limiter, $/(share/sec)^2 (>= 0)
    double beta2 = 0.0;  // limit-order speed limiter, $/(share/sec)^2 (>= 0)
    double R1 = 0.0;     // squared market-order speed cap r1^2, (share/sec)^2
    double R2 = 0.0;     // squared limit-order speed cap r2^2, (share/sec)^2
};

// Default speed caps when a config leaves R1/R2 unset: (x0/T)^2 each, the
// squared average liquidation rate. The caps only shift the value function's
// constant term, never the controls.
double default_speed_cap(const ModelParams& model);

// Which uncertainty structure a run declares. The zero pattern of (m0, m1)
// must agree with the declared mode.
enum class UncertaintyMode { constant, linear, affine, none, infinite_limit };

const char* to_string(UncertaintyMode mode);

// The coefficient ODEs carry a correlation source term rho*sigma*m_i whose
// subscript differs between the two internally-circulated forms of the system:
// the m0 form reproduces the constant-uncertainty closed forms (and gives the
// buy-sell boundary its adverse-selection tilt), while the m1 form is the one
// algebraically consistent with the feedback-control formulas, whose m1=0
// reduction fixes the controls themselves to the m1 reading. Both are kept
// selectable for the ODE side; controls always use the m1 reading.
enum class NoiseSource { m0, m1 };

const char* to_string(NoiseSource src);

// K = eta1*eta2 + beta1*beta2 + eta1*beta2 + eta2*beta1 = (eta1+beta1)(eta2+beta2).
double cross_term_K(const ModelParams& model, const PenaltyParams& pen);

// C = [4K - (eta1+eta2-alpha)^2] / (2(eta1+beta1)): the composite constant
// controlling concavity of the Hamiltonian in (v, L).
double compute_C(const ModelParams& model, const PenaltyParams& pen);

struct AlphaInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double alpha) const { return alpha > lo && alpha < hi; }
};

// Open interval of trade-director values for which C > 0:
// (eta1+eta2 - 2*sqrt(K), eta1+eta2 + 2*sqrt(K)).
AlphaInterval admissible_alpha_interval(const ModelParams& model, const PenaltyParams& pen);

// Second-order (concavity) condition at a given value-function curvature
// a = V_xx/2: true iff 2*m1^2*a < C - gamma*m1^2. With m1 = 0 this reduces
// to C > 0. Strict inequality; boundary equality fails.
bool second_order_condition(double a_value, const ModelParams& model, const PenaltyParams& pen);

// Blow-up time of the constant-uncertainty Riccati coefficient:
// T_crit = T + (eta1+beta1) C / ((alpha+beta1+beta2)(2 beta - gamma)).
// Requires m1 == 0 and beta > gamma/2 (which places T_crit beyond T).
double t_crit(const ModelParams& model, const PenaltyParams& pen);

struct HorizonBound {
    bool unbounded = false;
    double value = 0.0;  // meaningful when !unbounded
};

// Maximum admissible horizon under linear fill uncertainty. Unbounded when
// C >= gamma*m1^2; otherwise
// T_max = [4 m1^2 (eta1+beta1)(beta-gamma) + 2 (eta1+beta1) C] /
//         [(gamma m1^2 - C)(2 beta - gamma)].
// Exact when 2(alpha+beta1+beta2) = C holds (the explicit-solution condition);
// used as the horizon gate for any m1 > 0. Requires m1 > 0 and beta > gamma/2.
HorizonBound t_max(const ModelParams& model, const PenaltyParams& pen);

// Lower bound on the non-liquidation penalty implied by a fixed horizon T:
// gamma/2 + [ (gamma m1^2 - C)(eta1+beta1) / (2 m1^2 (eta1+beta1) + (C - gamma m1^2) T) ]^+.
// Requires m0 == 0, m1 > 0; throws if the denominator is non-positive
// ((T, penalties) jointly infeasible).
double beta_floor(const ModelParams& model, const PenaltyParams& pen, double T);

// Limit of beta_floor as m1 -> infinity:
// gamma/2 + [ gamma (eta1+beta1) / (2(eta1+beta1) - gamma T) ]^+.
// Throws if 2(eta1+beta1) <= gamma*T.
double beta_floor_infinite(const ModelParams& model, const PenaltyParams& pen, double T);

// Adjusts alpha so that 2(alpha+beta1+beta2) = C(alpha) holds exactly, which
// is the condition for the explicit linear-uncertainty solution. The quadratic
// in alpha always has the double root alpha* = eta2 - eta1 - 2*beta1; it is
// returned when alpha* >= 0 and C(alpha*) >= 0, otherwise the caller must
// adjust beta1/beta2 (or the impact asymmetry) first. C(alpha*) = 0 sits on
// the boundary of the admissible interval; that is accepted here because the
// linear-uncertainty concavity condition only needs C >= 0.
PenaltyParams enforce_explicit_linear_condition(const ModelParams& model, const PenaltyParams& pen);

// Everything derivable from (model, pen) in one straight pass.
struct DerivedConstants {
    double K = 0.0;
    double C = 0.0;
    AlphaInterval alpha_interval;
    std::optional<double> t_crit;        // m1 == 0 and beta > gamma/2 only
    std::optional<HorizonBound> t_max;   // m1 > 0 and beta > gamma/2 only
    std::optional<double> beta_floor;    // m1 > 0, floor denominator positive
    bool adverse_selection = false;
};

DerivedConstants derive_constants(const ModelParams& model, const PenaltyParams& pen);

// One validity check: name, computed value, the bound it is compared against,
// and whether it is a hard (solve-blocking) condition.
struct ValidityCheck {
    std::string name;
    bool pass = false;
    bool hard = false;
    double value = 0.0;
    double bound = 0.0;
    std::string note;
};

struct ValidityReport {
    std::vector<ValidityCheck> checks;

    bool ok() const {
        for (const auto& c : checks)
            if (c.hard && !c.pass) return false;
        return true;
    }
    std::string first_failure() const {
        for (const auto& c : checks)
            if (c.hard && !c.pass) return c.name;
        return {};
    }
};

// Runs every parameter-level check for the given mode. Construction of the
// parameter structs never fails; solve/simulate entry points call this and
// refuse to proceed when a hard check fails, so infeasible regions can still
// be explored diagnostically. All comparisons against analytic bounds are
// strict, with no epsilon slack.
ValidityReport run_validity_checks(const ModelParams& model, const PenaltyParams& pen,
                                   UncertaintyMode mode);

// Throws Error{validity} when the report carries a hard failure.
void require_valid(const ModelParams& model, const PenaltyParams& pen, UncertaintyMode mode);

}  // namespace optexec

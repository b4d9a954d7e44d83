#pragma once

#include <optional>
#include <vector>

#include "exec/params.hpp"
#include "exec/value_ode.hpp"

namespace optexec {

// Optimal feedback rates and diagnostics at one state (t, x).
struct PolicyEvaluation {
    double t = 0.0;
    double x = 0.0;
    double v_star = 0.0;  // market-order rate, share/sec
    double l_star = 0.0;  // limit-order rate, share/sec
    double delta = 0.0;   // Hessian determinant of the rate Hamiltonian
    double psi = 0.0;     // m1^2 (V_xx + gamma)
    // Buy-sell boundary P(t) = -(b(t)+eta0)/(2a(t)); present when m1 = 0 and
    // both rate coefficients are negative (eta1 = eta2 or the relaxed regime).
    std::optional<double> boundary;
    bool cap_exceeded_v = false;  // v*^2 > R1 (diagnostic; rates are never clamped)
    bool cap_exceeded_l = false;  // l*^2 > R2
};

// First-order-condition rates. The correlation term in the numerators is the
// m1 reading, the one whose m1 = 0 reduction reproduces the constant-
// uncertainty rate formulas. Throws when the Hessian determinant is within
// tolerance of singular.
PolicyEvaluation optimal_controls(const ValueCoefficients& coeffs, const ModelParams& model,
                                  const PenaltyParams& pen, double t, double x);

enum class BoundaryShape { non_increasing, non_decreasing, mixed };

const char* to_string(BoundaryShape shape);

// Deterministic threshold P(t): above it the optimal rates are sell-signed,
// below it buy-signed. Constant uncertainty only.
struct BoundaryProfile {
    std::vector<double> t;
    std::vector<double> P;
    BoundaryShape classification = BoundaryShape::mixed;
    double terminal_target = 0.0;  // P(T) = eta0 / (2 beta - gamma)
    // Set when eta1 != eta2: the clean sign characterization then relies on
    // eta1-eta2 < 2 beta2 + alpha and eta2-eta1 < 2 beta1 + alpha.
    bool relaxed_regime = false;

    std::string to_csv() const;  // columns: t,P
};

// Closed-form boundary value at time t; noise selects whether the
// rho*sigma*m0 tilt enters (it does under the m0 reading of the b-equation).
double boundary_value(const ModelParams& model, const PenaltyParams& pen, double t,
                      NoiseSource noise = NoiseSource::m0);

BoundaryProfile buy_sell_boundary(const ModelParams& model, const PenaltyParams& pen,
                                  int grid_size, NoiseSource noise = NoiseSource::m0);

struct BoundaryMonotonicity {
    BoundaryShape classification = BoundaryShape::mixed;
    // t at which P'(t) changes sign; outside [0, T] the shape is one-sided.
    std::optional<double> flip_time;
    // |rho| at or below the first threshold guarantees non-increasing P;
    // at or above the second, non-decreasing. Present when mu != 0 and the
    // adverse-selection term is active (m0 != 0, E != 0).
    std::optional<double> rho_threshold_non_increasing;
    std::optional<double> rho_threshold_non_decreasing;
};

// Analytic classification of P'(t) over [0, T]. With mu = 0 the boundary is
// linear and the classification is the sign of the constant slope.
BoundaryMonotonicity classify_boundary_monotonicity(const ModelParams& model,
                                                    const PenaltyParams& pen,
                                                    NoiseSource noise = NoiseSource::m0);

// Limiting strategy as the linear fill uncertainty grows without bound:
// market orders only, v = -(V_x + eta0) / (2(eta1+beta1)) evaluated on the
// limiting coefficients. Returns (v, 0).
std::pair<double, double> infinite_uncertainty_policy(const ModelParams& model,
                                                      const PenaltyParams& pen, double t,
                                                      double x);

}  // namespace optexec

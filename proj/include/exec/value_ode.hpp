#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exec/params.hpp"
#include "exec/schedule.hpp"
#include "exec/spline.hpp"

namespace optexec {

enum class CoeffSource {
    closed_form_constant,
    closed_form_linear,
    closed_form_infinite,
    numerical_affine,
    numerical_scheduled,
};

const char* to_string(CoeffSource source);

// Time-sampled coefficients of the quadratic value function
// V(t,x) = a(t) x^2 + b(t) x + c(t) on a uniform grid over [0, T].
// Terminal conditions hold bitwise at the last node:
// a(T) = gamma/2 - beta, b(T) = 0, c(T) = 0.
// Immutable after construction; off-grid evaluation by natural cubic spline.
class ValueCoefficients {
public:
    ValueCoefficients(std::vector<double> t, std::vector<double> a, std::vector<double> b,
                      std::vector<double> c, CoeffSource source, NoiseSource noise,
                      std::vector<double> w = {}, std::vector<double> q = {});

    double a(double t) const { return sa_(t); }
    double b(double t) const { return sb_(t); }
    double c(double t) const { return sc_(t); }
    // Spline derivatives; consumed by hjb_residual only.
    double da(double t) const { return sa_.derivative(t); }
    double db(double t) const { return sb_.derivative(t); }
    double dc(double t) const { return sc_.derivative(t); }

    double value(double t, double x) const { return (sa_(t) * x + sb_(t)) * x + sc_(t); }

    const std::vector<double>& grid() const { return t_; }
    const std::vector<double>& a_nodes() const { return a_; }
    const std::vector<double>& b_nodes() const { return b_; }
    const std::vector<double>& c_nodes() const { return c_; }

    CoeffSource source() const { return source_; }
    NoiseSource noise_source() const { return noise_; }
    bool scheduled() const { return !w_.empty(); }
    // Schedule weight / target sampled on the grid (scheduled solves only),
    // linearly interpolated off-grid.
    double weight_at(double t) const;
    double target_at(double t) const;

    // Columns: t,a,b,c
    std::string to_csv() const;

private:
    std::vector<double> t_, a_, b_, c_, w_, q_;
    CubicSpline sa_, sb_, sc_;
    CoeffSource source_;
    NoiseSource noise_;
};

// Backward RK4 integration of the general affine-uncertainty coefficient
// system, solved successively (a on a step/4 subgrid, then b on step/2 using
// the stored a, then c by per-interval Simpson quadrature of its source).
// grid_size = number of intervals of the output grid.
//
// Aborts (ErrorKind::solver, message carries the breach time) when the
// concavity denominator C - m1^2(2a+gamma) falls below 1e-12*|C| at any
// internal node, or on step-size underflow.
ValueCoefficients solve_affine_numerical(const ModelParams& model, const PenaltyParams& pen,
                                         int grid_size, NoiseSource noise = NoiseSource::m0);

// Constant uncertainty (m1 = 0): a and b in closed form, c by quadrature.
ValueCoefficients solve_constant_closed_form(const ModelParams& model, const PenaltyParams& pen,
                                             int grid_size, NoiseSource noise = NoiseSource::m0);

// Linear uncertainty (m0 = 0) under the explicit-solution condition
// 2(alpha+beta1+beta2) = C (required to relative tolerance 1e-10): a and b in
// closed form, c by quadrature. This closed form exists for the m0 reading of
// the ODE source (which vanishes here); use the numerical solver for the m1
// reading.
ValueCoefficients solve_linear_closed_form(const ModelParams& model, const PenaltyParams& pen,
                                           int grid_size);

// Infinite-uncertainty limit (m1 -> inf, m0 = 0): the limiting a and b are the
// linear-uncertainty closed forms; c integrates the limiting source
// beta1 R1 + beta2 R2 + (b+eta0)^2 / (4(eta1+beta1)).
ValueCoefficients solve_infinite_limit_closed_form(const ModelParams& model,
                                                   const PenaltyParams& pen, int grid_size);

// Schedule-following variant: adds -w(t) to the a-equation, +2 w(t) Q(t) to
// the b-equation and -w(t) Q(t)^2 to the c-equation. w and Q are sampled once
// onto the solver subgrid. w identically zero reduces exactly to
// solve_affine_numerical.
ValueCoefficients solve_scheduled(const ModelParams& model, const PenaltyParams& pen,
                                  const ScheduleSpec& sched, const WeightSpec& weight,
                                  int grid_size, NoiseSource noise = NoiseSource::m0);

// Dispatch on the declared uncertainty mode (closed forms where they exist).
ValueCoefficients solve_for_mode(const ModelParams& model, const PenaltyParams& pen,
                                 UncertaintyMode mode, int grid_size,
                                 NoiseSource noise = NoiseSource::m0);

// Left-hand side of the reduced HJB PDE at (t, x), evaluated with
// spline-differentiated a', b', c'. Zero for an exact solution; the noise
// convention and (for scheduled coefficients) the -w(t)(x-Q(t))^2 term are
// taken from the coefficients object.
double hjb_residual(const ValueCoefficients& coeffs, const ModelParams& model,
                    const PenaltyParams& pen, double t, double x);

}  // namespace optexec

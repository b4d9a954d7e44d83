#pragma once

#include <cmath>

#include "exec/params.hpp"

namespace testing {

// Standard parameter point used across the tests (seconds-based units).
inline optexec::ModelParams baseline_model() {
    optexec::ModelParams m;
    m.mu = 1e-6;
    m.sigma = 0.005;
    m.gamma = 2.5e-7;
    m.eta0 = 0.05;
    m.eta1 = 0.1;
    m.eta2 = 0.08;
    m.rho = -0.2;
    m.T = 3600.0;
    m.x0 = 10000.0;
    m.S0 = 40.0;
    return m;
}

inline optexec::PenaltyParams baseline_penalties(const optexec::ModelParams& m) {
    optexec::PenaltyParams p;
    p.alpha = 0.15;
    p.beta = 1e-3;
    p.beta1 = 5e-4;
    p.beta2 = 1e-4;
    p.R1 = optexec::default_speed_cap(m);
    p.R2 = optexec::default_speed_cap(m);
    return p;
}

inline double p0_to_m0(const optexec::ModelParams& m, double p0) {
    return p0 * m.x0 / std::sqrt(m.T);
}

inline double p1_to_m1(const optexec::ModelParams& m, double p1) { return p1 * std::sqrt(m.T); }

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testing

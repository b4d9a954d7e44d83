#include <doctest.h>

#include <cmath>

#include "exec/error.hpp"
#include "exec/policy.hpp"
#include "exec/rng.hpp"
#include "exec/value_ode.hpp"
#include "support.hpp"

using namespace optexec;
using testing::baseline_model;
using testing::baseline_penalties;
using testing::rel_err;

namespace {

ModelParams constant_baseline() {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.1);
    return m;
}

// boundary-figure configuration: equal impacts, constant uncertainty
ModelParams boundary_model(double rho = -0.2) {
    auto m = baseline_model();
    m.eta1 = m.eta2 = 0.1;
    m.m0 = testing::p0_to_m0(m, 0.1);
    m.rho = rho;
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("policy");

TEST_CASE("rates vanish exactly on the boundary") {
    const auto m = boundary_model();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 4000);
    for (double t : {0.0, 900.0, 2700.0, 3599.0}) {
        const double a = cc.a(t), b = cc.b(t);
        const double x_on = -(b + m.eta0) / (2.0 * a);
        const auto e = optimal_controls(cc, m, p, t, x_on);
        CHECK(std::abs(e.v_star) < 1e-12);
        CHECK(std::abs(e.l_star) < 1e-12);
        REQUIRE(e.boundary.has_value());
        CHECK(*e.boundary == doctest::Approx(x_on).epsilon(1e-14));
    }
}

TEST_CASE("rate ratio with equal impacts") {
    const auto m = boundary_model();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 2000);
    const double want = (2.0 * p.beta2 + p.alpha) / (2.0 * p.beta1 + p.alpha);
    const PathRng rng(3, 0);
    for (int k = 0; k < 32; ++k) {
        const double t = 0.999 * m.T * rng.u01(0, 2 * k);
        const double x = -2.0 * m.x0 + 4.0 * m.x0 * rng.u01(0, 2 * k + 1);
        const auto e = optimal_controls(cc, m, p, t, x);
        if (std::abs(e.l_star) < 1e-9) continue;  // too close to the boundary
        CHECK(rel_err(e.v_star / e.l_star, want) < 1e-10);
    }
}

TEST_CASE("baseline start: both rates positive, limit orders dominate") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 2000);
    const auto e = optimal_controls(cc, m, p, 0.0, m.x0);
    CHECK(e.v_star > 0.0);
    CHECK(e.l_star > 0.0);
    CHECK(e.l_star > e.v_star);
}

TEST_CASE("sign linkage with the buy-sell boundary") {
    const auto m = boundary_model();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 4000);
    const PathRng rng(11, 0);
    for (int k = 0; k < 1000; ++k) {
        const double t = m.T * rng.u01(0, 3 * k);
        const double x = -2.0 * m.x0 + 4.0 * m.x0 * rng.u01(0, 3 * k + 1);
        const auto e = optimal_controls(cc, m, p, t, x);
        REQUIRE(e.boundary.has_value());
        const double side = x - *e.boundary;
        if (side == 0.0) continue;
        CAPTURE(t);
        CAPTURE(x);
        CHECK(std::signbit(e.v_star) == std::signbit(side));
        CHECK(std::signbit(e.l_star) == std::signbit(side));
    }
}

TEST_CASE("rates are affine in x") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 2000);
    for (double t : {0.0, 1000.0, 3000.0}) {
        const double x0 = -5000.0, x1 = 4000.0, x2 = 13000.0;
        const auto e0 = optimal_controls(cc, m, p, t, x0);
        const auto e1 = optimal_controls(cc, m, p, t, x1);
        const auto e2 = optimal_controls(cc, m, p, t, x2);
        // three-point collinearity: midpoint value of the chord
        const double u = (x1 - x0) / (x2 - x0);
        CHECK(rel_err(e0.v_star + u * (e2.v_star - e0.v_star), e1.v_star) < 1e-12);
        CHECK(rel_err(e0.l_star + u * (e2.l_star - e0.l_star), e1.l_star) < 1e-12);
    }
}

TEST_CASE("determinant identity delta = 2(eta1+beta1)(C - psi)") {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.05);
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const auto sol = solve_affine_numerical(m, p, 2000);
    const double C = compute_C(m, p);
    for (double t : {0.0, 1200.0, 2400.0, 3599.0}) {
        const auto e = optimal_controls(sol, m, p, t, m.x0);
        const double identity = 2.0 * (m.eta1 + p.beta1) * (C - e.psi);
        CHECK(rel_err(e.delta, identity) < 1e-12);
        CHECK(e.delta > 0.0);
    }
}

TEST_CASE("buy-sell boundary profile") {
    const auto m = boundary_model();
    auto p = baseline_penalties(m);

    SUBCASE("terminal target") {
        const auto prof = buy_sell_boundary(m, p, 100);
        CHECK(rel_err(prof.terminal_target, 25.003125390673834) < 1e-12);
        CHECK(prof.P.back() == prof.terminal_target);
        auto ph = p;
        ph.beta = 0.1;
        const auto prof_h = buy_sell_boundary(m, ph, 100);
        CHECK(rel_err(prof_h.terminal_target, 0.25000031250039063) < 1e-12);
    }
    SUBCASE("higher beta shifts the whole boundary down") {
        const auto lo = buy_sell_boundary(m, p, 360);
        auto ph = p;
        ph.beta = 0.1;
        const auto hi = buy_sell_boundary(m, ph, 360);
        for (size_t i = 0; i < lo.P.size(); ++i) CHECK(hi.P[i] < lo.P[i]);
    }
    SUBCASE("no-drift no-spread reduction: negative boundary rising to zero") {
        auto m2 = m;
        m2.mu = 0.0;
        m2.eta0 = 0.0;
        CHECK(m2.adverse_selection());  // rho*m0 < 0
        const auto prof = buy_sell_boundary(m2, p, 360);
        for (size_t i = 0; i + 1 < prof.P.size(); ++i) {
            CHECK(prof.P[i] < 0.0);
            CHECK(prof.P[i] < prof.P[i + 1]);
        }
        CHECK(prof.P.back() == 0.0);
        // closed form: (alpha + 2 beta1) rho sigma m0 (T-t) / (2 (eta+beta1) C)
        const double C = compute_C(m2, p);
        const double want0 = (p.alpha + 2.0 * p.beta1) * m2.rho * m2.sigma * m2.m0 * m2.T /
                             (2.0 * (m2.eta1 + p.beta1) * C);
        CHECK(rel_err(prof.P.front(), want0) < 1e-12);
    }
    SUBCASE("matches the zero of the rate numerator from the coefficients") {
        const auto cc = solve_constant_closed_form(m, p, 2000);
        const auto prof = buy_sell_boundary(m, p, 2000);
        for (size_t i = 0; i < prof.t.size(); i += 100) {
            const double t = prof.t[i];
            const double from_coeffs = -(cc.b(t) + m.eta0) / (2.0 * cc.a(t));
            CHECK(rel_err(prof.P[i], from_coeffs) < 1e-9);
        }
    }
    SUBCASE("m1 != 0 rejected") {
        auto m2 = baseline_model();
        m2.m1 = 3.0;
        CHECK_THROWS_AS(buy_sell_boundary(m2, p, 100), Error);
    }
    SUBCASE("relaxed regime flagged, far-apart impacts rejected") {
        auto m2 = m;
        m2.eta2 = 0.08;  // |eta1-eta2| = 0.02 < 2 beta2 + alpha
        const auto prof = buy_sell_boundary(m2, baseline_penalties(m2), 100);
        CHECK(prof.relaxed_regime);
        auto m3 = m;
        m3.eta1 = 0.5;  // eta1 - eta2 = 0.4 > 2 beta2 + alpha
        CHECK_THROWS_AS(buy_sell_boundary(m3, baseline_penalties(m3), 100), Error);
    }
}

TEST_CASE("boundary monotonicity classification") {
    const auto p = baseline_penalties(boundary_model());

    SUBCASE("figure pair: rho = -0.2 rises, rho = -0.0005 falls") {
        const auto inc = classify_boundary_monotonicity(boundary_model(-0.2), p);
        const auto dec = classify_boundary_monotonicity(boundary_model(-0.0005), p);
        CHECK(inc.classification == BoundaryShape::non_decreasing);
        CHECK(dec.classification == BoundaryShape::non_increasing);
    }
    SUBCASE("frozen thresholds") {
        const auto mono = classify_boundary_monotonicity(boundary_model(-0.2), p);
        REQUIRE(mono.rho_threshold_non_increasing.has_value());
        REQUIRE(mono.rho_threshold_non_decreasing.has_value());
        CHECK(rel_err(*mono.rho_threshold_non_increasing, 0.0014997980707853382) < 1e-12);
        CHECK(rel_err(*mono.rho_threshold_non_decreasing, 0.087670923898599908) < 1e-12);
    }
    SUBCASE("no adverse-selection tilt: non-increasing for positive drift") {
        const auto mono = classify_boundary_monotonicity(boundary_model(0.0), p);
        CHECK(mono.classification == BoundaryShape::non_increasing);
    }
    SUBCASE("classification flips at the threshold under 1e-6 relative nudges") {
        const auto thr = *classify_boundary_monotonicity(boundary_model(-0.2), p)
                              .rho_threshold_non_increasing;
        const auto at = classify_boundary_monotonicity(boundary_model(-thr), p);
        CHECK(at.classification == BoundaryShape::non_increasing);
        const auto above =
            classify_boundary_monotonicity(boundary_model(-thr * (1.0 + 1e-6)), p);
        CHECK(above.classification == BoundaryShape::mixed);
        const auto below =
            classify_boundary_monotonicity(boundary_model(-thr * (1.0 - 1e-6)), p);
        CHECK(below.classification == BoundaryShape::non_increasing);
    }
    SUBCASE("grid scan of P agrees with the analytic classification") {
        for (double rho : {-0.2, -0.0005, -0.0014, -0.0016, 0.3}) {
            const auto m = boundary_model(rho);
            const auto mono = classify_boundary_monotonicity(m, p);
            const auto prof = buy_sell_boundary(m, p, 7200);
            bool any_up = false, any_down = false;
            for (size_t i = 0; i + 1 < prof.P.size(); ++i) {
                if (prof.P[i + 1] > prof.P[i]) any_up = true;
                if (prof.P[i + 1] < prof.P[i]) any_down = true;
            }
            const BoundaryShape scanned = any_up && any_down
                                              ? BoundaryShape::mixed
                                              : (any_up ? BoundaryShape::non_decreasing
                                                        : BoundaryShape::non_increasing);
            CAPTURE(rho);
            CHECK(scanned == mono.classification);
        }
    }
    SUBCASE("zero drift: linear boundary classified by the tilt sign") {
        auto m = boundary_model(-0.2);
        m.mu = 0.0;
        CHECK(classify_boundary_monotonicity(m, p).classification ==
              BoundaryShape::non_decreasing);
        m.rho = 0.2;  // rho m0 > 0: decreasing
        CHECK(classify_boundary_monotonicity(m, p).classification ==
              BoundaryShape::non_increasing);
    }
}

TEST_CASE("infinite-uncertainty policy") {
    const auto m = baseline_model();  // m0 = m1 = 0 in the closed form
    const auto p = baseline_penalties(m);

    SUBCASE("frozen value at the start") {
        const auto [v, l] = infinite_uncertainty_policy(m, p, 0.0, m.x0);
        CHECK(l == 0.0);
        auto m2 = m;
        m2.mu = 0.0;  // the frozen value is for the driftless closed form
        const auto [v0, l0] = infinite_uncertainty_policy(m2, p, 0.0, m2.x0);
        CHECK(rel_err(v0, 2.6955716814637640) < 1e-12);
    }
    SUBCASE("rate vanishes at the terminal target eta0/(2 beta - gamma)") {
        auto m2 = m;
        m2.mu = 0.0;
        const double target = m2.eta0 / (2.0 * p.beta - m2.gamma);
        const auto [v, l] = infinite_uncertainty_policy(m2, p, 1000.0, target);
        CHECK(std::abs(v) < 1e-15);
        CHECK(l == 0.0);
    }
    SUBCASE("optimal controls converge to the limit as m1 grows") {
        auto mm = m;
        mm.mu = 0.0;
        mm.m0 = 0.0;
        double prev_max_l = 1e300;
        for (double m1 : {10.0, 100.0, 1000.0, 10000.0}) {
            mm.m1 = m1;
            const auto sol = solve_affine_numerical(mm, p, 1800);
            double max_l = 0.0;
            for (double t = 0.0; t <= mm.T; t += mm.T / 60.0) {
                const auto e = optimal_controls(sol, mm, p, t, mm.x0);
                max_l = std::max(max_l, std::abs(e.l_star));
            }
            CHECK(max_l < prev_max_l);
            prev_max_l = max_l;
            if (m1 == 10000.0) {
                const auto e = optimal_controls(sol, mm, p, 0.0, mm.x0);
                const auto [v_lim, l_lim] = infinite_uncertainty_policy(mm, p, 0.0, mm.x0);
                CHECK(rel_err(e.v_star, v_lim) < 1e-3);
                CHECK(std::abs(e.l_star) < 1e-3 * std::abs(e.v_star));
            }
        }
    }
}

TEST_CASE("speed-cap diagnostics flag but never clamp") {
    const auto m = constant_baseline();
    auto p = baseline_penalties(m);
    p.R1 = p.R2 = 1e-6;  // absurdly tight caps
    const auto cc = solve_constant_closed_form(m, p, 500);
    const auto e = optimal_controls(cc, m, p, 0.0, m.x0);
    CHECK(e.cap_exceeded_v);
    CHECK(e.cap_exceeded_l);
    CHECK(std::abs(e.v_star) > 0.1);  // unclamped
}

TEST_SUITE_END();

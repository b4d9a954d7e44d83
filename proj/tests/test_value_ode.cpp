#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "exec/error.hpp"
#include "exec/rng.hpp"
#include "exec/value_ode.hpp"
#include "support.hpp"

using namespace optexec;
using testing::baseline_model;
using testing::baseline_penalties;
using testing::rel_err;

namespace {

// sup-norm relative error between two node vectors: ||x-y||_inf / ||y||_inf
double sup_rel(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < want.size(); ++i) {
        num = std::max(num, std::abs(got[i] - want[i]));
        den = std::max(den, std::abs(want[i]));
    }
    return num / den;
}

ModelParams constant_baseline() {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.1);
    return m;
}

// linear-uncertainty point satisfying the explicit-solution condition
void linear_explicit(ModelParams& m, PenaltyParams& p) {
    m = baseline_model();
    m.eta1 = 0.08;
    m.eta2 = 0.1;
    m.m0 = 0.0;
    m.m1 = testing::p1_to_m1(m, 0.1);
    p = baseline_penalties(m);
    p = enforce_explicit_linear_condition(m, p);
}

}  // namespace

TEST_SUITE_BEGIN("value-ode");

TEST_CASE("terminal conditions are exact at the last node") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    for (const auto& coeffs :
         {solve_constant_closed_form(m, p, 100), solve_affine_numerical(m, p, 100)}) {
        CHECK(coeffs.a_nodes().back() == m.gamma / 2.0 - p.beta);  // bitwise
        CHECK(coeffs.b_nodes().back() == 0.0);
        CHECK(coeffs.c_nodes().back() == 0.0);
    }
}

TEST_CASE("constant closed form: frozen values") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 2000);
    CHECK(rel_err(cc.a_nodes().front(), -1.4227725065758981e-5) < 1e-12);
    CHECK(rel_err(cc.b_nodes().front(), -0.056790421381193913) < 1e-12);
    CHECK(cc.a_nodes().back() == doctest::Approx(-9.99875e-4).epsilon(1e-12));

    SUBCASE("a(t) < 0 and strictly decreasing toward the terminal value") {
        for (size_t i = 0; i + 1 < cc.a_nodes().size(); ++i) {
            CHECK(cc.a_nodes()[i] < 0.0);
            CHECK(cc.a_nodes()[i] > cc.a_nodes()[i + 1]);
        }
    }
    SUBCASE("m1 reading of the source term drops the correlation tilt in b") {
        const auto cm1 = solve_constant_closed_form(m, p, 2000, NoiseSource::m1);
        CHECK(rel_err(cm1.b_nodes().front(), -0.047462911705556879) < 1e-12);
        CHECK(cm1.a_nodes().front() == cc.a_nodes().front());  // a is source-free
    }
}

TEST_CASE("constant closed form: b degenerates correctly") {
    auto m = constant_baseline();
    m.mu = 0.0;
    m.m0 = 0.0;
    m.m1 = 0.0;
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 500);
    // b(t) = -eta0 - a(t) * 2 eta0 / (2 beta - gamma), and b(T) = 0
    for (size_t i = 0; i < cc.grid().size(); ++i) {
        const double want =
            -m.eta0 - cc.a_nodes()[i] * 2.0 * m.eta0 / (2.0 * p.beta - m.gamma);
        CHECK(std::abs(cc.b_nodes()[i] - want) < 1e-15);
    }
}

TEST_CASE("numerical solver reproduces the constant closed form") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    for (auto noise : {NoiseSource::m0, NoiseSource::m1}) {
        const auto cf = solve_constant_closed_form(m, p, 10000, noise);
        const auto nm = solve_affine_numerical(m, p, 10000, noise);
        CHECK(sup_rel(nm.a_nodes(), cf.a_nodes()) < 1e-8);
        CHECK(sup_rel(nm.b_nodes(), cf.b_nodes()) < 1e-8);
        CHECK(sup_rel(nm.c_nodes(), cf.c_nodes()) < 1e-8);
    }
}

TEST_CASE("numerical solver reproduces the linear closed form") {
    ModelParams m;
    PenaltyParams p;
    linear_explicit(m, p);
    const auto cf = solve_linear_closed_form(m, p, 10000);
    const auto nm = solve_affine_numerical(m, p, 10000, NoiseSource::m0);
    CHECK(sup_rel(nm.a_nodes(), cf.a_nodes()) < 1e-8);
    CHECK(sup_rel(nm.b_nodes(), cf.b_nodes()) < 1e-8);
    CHECK(sup_rel(nm.c_nodes(), cf.c_nodes()) < 1e-8);

    SUBCASE("terminal cancellation b(T) = 0 and a(T) = gamma/2 - beta") {
        CHECK(cf.a_nodes().back() == m.gamma / 2.0 - p.beta);
        CHECK(cf.b_nodes().back() == 0.0);
    }
    SUBCASE("a strictly decreasing in t") {
        for (size_t i = 0; i + 1 < cf.a_nodes().size(); ++i)
            CHECK(cf.a_nodes()[i] > cf.a_nodes()[i + 1]);
    }
    SUBCASE("preconditions are named") {
        auto m2 = m;
        m2.m0 = 1.0;
        CHECK_THROWS_WITH_AS(solve_linear_closed_form(m2, p, 100),
                             doctest::Contains("requires m0 = 0"), Error);
        auto p2 = p;
        p2.alpha *= 1.5;
        CHECK_THROWS_WITH_AS(solve_linear_closed_form(m, p2, 100),
                             doctest::Contains("2(alpha+beta1+beta2) = C"), Error);
    }
}

TEST_CASE("homogeneous b stays zero") {
    auto m = baseline_model();
    m.mu = 0.0;
    m.eta0 = 0.0;
    m.m0 = 0.0;
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const auto nm = solve_affine_numerical(m, p, 1000);
    for (const double b : nm.b_nodes()) CHECK(std::abs(b) < 1e-14);
}

TEST_CASE("grid refinement converges at fourth order") {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.05);
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);

    const auto fine = solve_affine_numerical(m, p, 6400);
    auto err_at = [&](int n) {
        const auto sol = solve_affine_numerical(m, p, n);
        double ea = 0.0, eb = 0.0, ec = 0.0;
        const int step = 6400 / n;
        for (int i = 0; i <= n; ++i) {
            ea = std::max(ea, std::abs(sol.a_nodes()[i] - fine.a_nodes()[i * step]));
            eb = std::max(eb, std::abs(sol.b_nodes()[i] - fine.b_nodes()[i * step]));
            ec = std::max(ec, std::abs(sol.c_nodes()[i] - fine.c_nodes()[i * step]));
        }
        return std::array<double, 3>{ea, eb, ec};
    };
    const auto e100 = err_at(100), e200 = err_at(200), e400 = err_at(400);
    for (int k = 0; k < 3; ++k) {
        CAPTURE(k);
        const double order1 = std::log2(e100[k] / e200[k]);
        const double order2 = std::log2(e200[k] / e400[k]);
        CHECK(order1 > 3.6);
        CHECK(order2 > 3.6);
    }
}

TEST_CASE("large-m1 solutions approach the infinite-uncertainty limit") {
    auto m = baseline_model();
    m.mu = 0.0;
    m.m0 = 0.0;
    const auto p = baseline_penalties(m);
    const auto lim = solve_infinite_limit_closed_form(m, p, 400);

    double prev = 1e300;
    for (double m1 : {10.0, 100.0, 1000.0, 10000.0}) {
        auto mm = m;
        mm.m1 = m1;
        const auto sol = solve_affine_numerical(mm, p, 400);
        const double err = sup_rel(sol.a_nodes(), lim.a_nodes());
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("scheduled solver") {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.05);
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const auto sched = ScheduleSpec::linear(m.x0, m.T);

    SUBCASE("zero weight reduces exactly to the unscheduled solve") {
        const auto plain = solve_affine_numerical(m, p, 600);
        const auto w0 = solve_scheduled(m, p, sched, WeightSpec::constant(0.0), 600);
        for (size_t i = 0; i < plain.grid().size(); ++i) {
            CHECK(std::abs(w0.a_nodes()[i] - plain.a_nodes()[i]) <= 1e-12);
            CHECK(std::abs(w0.b_nodes()[i] - plain.b_nodes()[i]) <= 1e-12);
            CHECK(std::abs(w0.c_nodes()[i] - plain.c_nodes()[i]) <= 1e-12);
        }
    }
    SUBCASE("positive weight pushes a downward") {
        const auto plain = solve_affine_numerical(m, p, 600);
        const auto w = solve_scheduled(m, p, sched, WeightSpec::constant(1e-4), 600);
        CHECK(w.a_nodes().front() < plain.a_nodes().front());
    }
    SUBCASE("quadratic target solves with finite coefficients") {
        const auto quad = ScheduleSpec::quadratic(m.x0, m.T);
        const auto w = solve_scheduled(m, p, quad, WeightSpec::constant(1e-4), 600);
        for (size_t i = 0; i < w.grid().size(); ++i) {
            CHECK(std::isfinite(w.a_nodes()[i]));
            CHECK(std::isfinite(w.b_nodes()[i]));
            CHECK(std::isfinite(w.c_nodes()[i]));
        }
    }
    SUBCASE("scheduled value never exceeds the unscheduled one") {
        const auto plain = solve_affine_numerical(m, p, 600);
        const auto w = solve_scheduled(m, p, sched, WeightSpec::constant(1e-4), 600);
        CHECK(w.value(0.0, m.x0) <= plain.value(0.0, m.x0));
    }
}

TEST_CASE("hjb residual") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);

    SUBCASE("closed-form coefficients annihilate the PDE") {
        const auto cc = solve_constant_closed_form(m, p, 10000);
        const PathRng rng(7, 0);
        for (int k = 0; k < 100; ++k) {
            const double t = 0.99 * m.T * rng.u01(0, 2 * k);
            const double x = -2.0 * m.x0 + 4.0 * m.x0 * rng.u01(0, 2 * k + 1);
            const double r = hjb_residual(cc, m, p, t, x);
            CAPTURE(t);
            CAPTURE(x);
            CHECK(std::abs(r) < 1e-6 * (1.0 + std::abs(cc.value(t, x))));
        }
    }
    SUBCASE("scheduled coefficients satisfy the penalized PDE") {
        auto ms = m;
        ms.m0 = testing::p0_to_m0(m, 0.05);
        ms.m1 = testing::p1_to_m1(m, 0.05);
        const auto sched = ScheduleSpec::linear(ms.x0, ms.T);
        const auto sol = solve_scheduled(ms, p, sched, WeightSpec::constant(1e-4), 4000);
        const PathRng rng(8, 0);
        for (int k = 0; k < 50; ++k) {
            const double t = ms.T * (0.05 + 0.9 * rng.u01(0, 2 * k));
            const double x = ms.x0 * rng.u01(0, 2 * k + 1);
            const double r = hjb_residual(sol, ms, p, t, x);
            CHECK(std::abs(r) < 1e-4 * (1.0 + std::abs(sol.value(t, x))));
        }
    }
    SUBCASE("residual decays at third order or better across three grid doublings") {
        auto ma = baseline_model();
        ma.m0 = testing::p0_to_m0(ma, 0.05);
        ma.m1 = testing::p1_to_m1(ma, 0.05);
        // rms over fixed quasi-random interior points; the per-doubling rate
        // oscillates with the grid phase at fixed points, so the order is
        // measured across the full window
        auto rms = [&](int n) {
            const auto sol = solve_affine_numerical(ma, p, n);
            double s = 0.0;
            for (int k = 0; k < 64; ++k) {
                const double ut = k * 0.6180339887498949;
                const double ux = k * 0.7548776662466927;
                const double t = ma.T * (0.05 + 0.9 * (ut - std::floor(ut)));
                const double x = -2.0 * ma.x0 + 4.0 * ma.x0 * (ux - std::floor(ux));
                const double r = hjb_residual(sol, ma, p, t, x);
                s += r * r;
            }
            return std::sqrt(s / 64.0);
        };
        const double r0 = rms(2000), r1 = rms(4000), r2 = rms(8000), r3 = rms(16000);
        CHECK(std::log2(r0 / r1) > 1.5);
        CHECK(std::log2(r1 / r2) > 1.5);
        CHECK(std::log2(r2 / r3) > 1.5);
        CHECK(std::log2(r0 / r3) / 3.0 >= 3.0);
    }
    SUBCASE("a deliberate 1% perturbation is detected") {
        const auto cc = solve_constant_closed_form(m, p, 2000);
        auto a = cc.a_nodes();
        for (auto& v : a) v *= 1.01;
        const ValueCoefficients bad(cc.grid(), a, cc.b_nodes(), cc.c_nodes(),
                                    cc.source(), cc.noise_source());
        const double t = 0.4 * m.T, x = m.x0;
        CHECK(std::abs(hjb_residual(bad, m, p, t, x)) >
              100.0 * std::abs(hjb_residual(cc, m, p, t, x)));
    }
}

TEST_CASE("solver rejects invalid inputs") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    CHECK_THROWS_AS(solve_affine_numerical(m, p, 1), Error);
    auto pb = p;
    pb.beta = 1e-7;  // below gamma/2
    CHECK_THROWS_AS(solve_affine_numerical(m, pb, 100), Error);
    auto pa = p;
    pa.alpha = 0.4;  // outside the admissible interval
    CHECK_THROWS_AS(solve_constant_closed_form(m, pa, 100), Error);
}

TEST_CASE("csv export shape") {
    const auto m = constant_baseline();
    const auto p = baseline_penalties(m);
    const auto cc = solve_constant_closed_form(m, p, 10);
    const auto csv = cc.to_csv();
    CHECK(csv.substr(0, 8) == "t,a,b,c\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);  // header + 11 nodes
}

TEST_SUITE_END();

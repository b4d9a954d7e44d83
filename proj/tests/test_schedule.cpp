#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "exec/error.hpp"
#include "exec/schedule.hpp"
#include "exec/simulator.hpp"
#include "exec/value_ode.hpp"
#include "support.hpp"

using namespace optexec;
using testing::baseline_model;
using testing::baseline_penalties;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_SUITE_BEGIN("schedule");

TEST_CASE("closed-form schedules") {
    const auto lin = ScheduleSpec::linear(10000.0, 3600.0);
    CHECK(lin(0.0) == 10000.0);
    CHECK(lin(1800.0) == doctest::Approx(5000.0));
    CHECK(lin(3600.0) == 0.0);

    const auto quad = ScheduleSpec::quadratic(10000.0, 3600.0);
    CHECK(quad(1800.0) == doctest::Approx(7500.0));
    CHECK(quad(3600.0) == 0.0);
}

TEST_CASE("tabulated schedule validation names the offending row") {
    SUBCASE("increasing segment") {
        CHECK_THROWS_WITH_AS(
            ScheduleSpec::tabulated({0.0, 1.0, 2.0}, {10.0, 11.0, 0.0}),
            doctest::Contains("row 1"), Error);
    }
    SUBCASE("negative value") {
        CHECK_THROWS_WITH_AS(ScheduleSpec::tabulated({0.0, 1.0, 2.0}, {10.0, -1.0, 0.0}),
                             doctest::Contains("row 1"), Error);
    }
    SUBCASE("terminal value nonzero") {
        CHECK_THROWS_WITH_AS(ScheduleSpec::tabulated({0.0, 1.0, 2.0}, {10.0, 5.0, 1.0}),
                             doctest::Contains("row 2"), Error);
    }
    SUBCASE("non-monotone time") {
        CHECK_THROWS_AS(ScheduleSpec::tabulated({0.0, 2.0, 1.0}, {10.0, 5.0, 0.0}), Error);
    }
    SUBCASE("flat segments allowed") {
        const auto s = ScheduleSpec::tabulated({0.0, 1.0, 2.0, 3.0}, {10.0, 10.0, 4.0, 0.0});
        CHECK(s(0.5) == 10.0);
        CHECK(s(2.5) == 2.0);
    }
}

TEST_CASE("tabulated copy of the quadratic stays within the interpolation bound") {
    const double x0 = 10000.0, T = 3600.0;
    const auto quad = ScheduleSpec::quadratic(x0, T);
    std::vector<double> t, q;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(T * i / 100.0);
        q.push_back(quad(t.back()));
    }
    q.back() = 0.0;
    const auto tab = ScheduleSpec::tabulated(t, q);
    double worst = 0.0;
    for (double u = 0.0; u <= T; u += 7.3) worst = std::max(worst, std::abs(tab(u) - quad(u)));
    CHECK(worst < x0 * 1e-4);  // (1/100)^2 linear-interpolation bound
}

TEST_CASE("schedule csv ingestion") {
    const auto good = write_temp("sched_ok.csv", "t,Q\n0,10000\n1800,5000\n3600,0\n");
    const auto s = ScheduleSpec::from_csv(good.string());
    CHECK(s(900.0) == doctest::Approx(7500.0));

    const auto bad = write_temp("sched_bad.csv", "t,Q\n0,10000\n1800,oops\n3600,0\n");
    CHECK_THROWS_WITH_AS(ScheduleSpec::from_csv(bad.string()), doctest::Contains("row 3"), Error);
    CHECK_THROWS_AS(ScheduleSpec::from_csv("/nonexistent/sched.csv"), Error);
}

TEST_CASE("weights validate") {
    CHECK_THROWS_AS(WeightSpec::constant(-1.0), Error);
    const auto w = WeightSpec::tabulated({0.0, 1800.0, 3600.0}, {1e-4, 2e-4, 0.0});
    CHECK(w(900.0) == doctest::Approx(1.5e-4));
    CHECK_THROWS_AS(WeightSpec::tabulated({0.0, 3600.0}, {1e-4, -1e-4}), Error);
}

TEST_CASE("tracking error metrics") {
    const auto sched = ScheduleSpec::linear(10000.0, 3600.0);

    SUBCASE("identity path scores zero") {
        SimPath path;
        for (int i = 0; i <= 36; ++i) {
            path.t.push_back(100.0 * i);
            path.x.push_back(sched(path.t.back()));
        }
        path.x_T = 0.0;
        const auto rep = tracking_error({path}, sched);
        CHECK(rep.overall.max_abs == 0.0);
        CHECK(rep.overall.mean_square == 0.0);
        CHECK(rep.overall.terminal_gap == 0.0);
    }
    SUBCASE("constant offset scores its square") {
        SimPath path;
        for (int i = 0; i <= 36; ++i) {
            path.t.push_back(100.0 * i);
            path.x.push_back(sched(path.t.back()) + 3.0);
        }
        path.x_T = 3.0;
        const auto rep = tracking_error({path}, sched);
        CHECK(rep.overall.max_abs == doctest::Approx(3.0));
        CHECK(rep.overall.mean_square == doctest::Approx(9.0));
        CHECK(rep.overall.terminal_gap == doctest::Approx(3.0));
    }
}

TEST_CASE("deterministic tracking tightens as the weight grows") {
    auto m = baseline_model();
    m.sigma = 0.0;
    m.m0 = 0.0;
    m.m1 = 0.0;
    const auto p = baseline_penalties(m);
    const auto sched = ScheduleSpec::linear(m.x0, m.T);

    double prev = 1e300;
    for (double wv : {1e-4, 1e-2, 1.0, 10.0}) {
        const auto w = WeightSpec::constant(wv);
        // the tracking Riccati relaxes at rate ~ sqrt(w * quadratic coeff):
        // the grid has to resolve the stiffest (w = 10) case
        const auto coeffs = solve_scheduled(m, p, sched, w, 72000);
        SimConfig sc;
        // the tracking gain scales like sqrt(w); resolve the fastest case
        sc.n_steps = 720000;
        sc.n_paths = 1;
        const auto path = simulate_path(m, p, &coeffs, sc, 0, &sched, &w);
        const auto rep = tracking_error({path}, sched);
        CAPTURE(wv);
        CHECK(rep.overall.max_abs < prev);
        prev = rep.overall.max_abs;
    }
    CHECK(prev < 0.005 * m.x0);  // w = 10: essentially glued to the schedule
}

TEST_CASE("schedule penalty ledger is nonpositive, zero only at perfect tracking") {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.05);
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const auto sched = ScheduleSpec::linear(m.x0, m.T);
    const auto w = WeightSpec::constant(1e-4);
    const auto coeffs = solve_scheduled(m, p, sched, w, 3600);
    SimConfig sc;
    sc.n_steps = 3600;
    for (std::uint64_t k = 0; k < 8; ++k) {
        const auto path = simulate_path(m, p, &coeffs, sc, k, &sched, &w);
        CHECK(path.schedule_penalty_integral <= 0.0);
        CHECK(path.schedule_penalty_integral < 0.0);  // noise guarantees some deviation
    }
}

TEST_CASE("scheduled value function never improves on the unscheduled one") {
    auto m = baseline_model();
    m.m0 = testing::p0_to_m0(m, 0.05);
    m.m1 = testing::p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const auto plain = solve_affine_numerical(m, p, 1200);
    for (double wv : {1e-5, 1e-4, 1e-2}) {
        const auto sol = solve_scheduled(m, p, ScheduleSpec::linear(m.x0, m.T),
                                         WeightSpec::constant(wv), 1200);
        CHECK(sol.value(0.0, m.x0) <= plain.value(0.0, m.x0));
    }
}

TEST_SUITE_END();

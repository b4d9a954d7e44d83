#include "exec/suite.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "exec/error.hpp"

namespace optexec {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Standard parameter point used by every scenario, seconds-based units.
ModelParams baseline_model() {
    ModelParams m;
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

PenaltyParams baseline_penalties(const ModelParams& m) {
    PenaltyParams p;
    p.alpha = 0.15;
    p.beta = 1e-3;
    p.beta1 = 5e-4;
    p.beta2 = 1e-4;
    p.R1 = default_speed_cap(m);
    p.R2 = default_speed_cap(m);
    return p;
}

double p0_to_m0(const ModelParams& m, double p0) { return p0 * m.x0 / std::sqrt(m.T); }
double p1_to_m1(const ModelParams& m, double p1) { return p1 * std::sqrt(m.T); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
}

struct SuiteContext {
    const RunConfig& base;
    fs::path out_dir;
    bool writing = false;

    SimConfig sim(int paths, PolicyKind kind = PolicyKind::optimal) const {
        SimConfig s;
        s.n_steps = base.sim.n_steps;
        s.n_paths = paths;
        s.seed = base.sim.seed;
        s.policy.kind = kind;
        s.record_every = base.sim.record_every;
        s.threads = base.sim.threads;
        return s;
    }

    void dump_path(const std::string& scenario, const std::string& leg, const SimPath& path) const {
        if (!writing) return;
        const fs::path dir = out_dir / scenario;
        fs::create_directories(dir);
        write_text(dir / (leg + "_path0.csv"), path.to_csv());
    }

    void dump_text(const std::string& scenario, const std::string& name,
                   const std::string& text) const {
        if (!writing) return;
        const fs::path dir = out_dir / scenario;
        fs::create_directories(dir);
        write_text(dir / name, text);
    }
};

void claim(ScenarioResult& r, const std::string& name, bool pass, const std::string& detail) {
    r.claims.push_back({name, pass, detail});
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Constant / linear / no uncertainty under one shared noise panel.
ScenarioResult scenario_uncertainty_trio(const SuiteContext& ctx) {
    ScenarioResult r;
    r.name = "uncertainty-trio-shared-noise";
    const auto m = baseline_model();
    const auto p = baseline_penalties(m);
    const int paths = std::max(ctx.base.sim.n_paths, 200);

    struct Leg {
        const char* name;
        double m0, m1;
    };
    const Leg legs[] = {{"constant", p0_to_m0(m, 0.1), 0.0},
                        {"linear", 0.0, p1_to_m1(m, 0.1)},
                        {"none", 0.0, 0.0}};

    std::vector<std::uint64_t> checksums;
    std::vector<double> mean_abs_xT;
    for (const auto& leg : legs) {
        ModelParams lm = m;
        lm.m0 = leg.m0;
        lm.m1 = leg.m1;
        const auto coeffs = solve_affine_numerical(lm, p, ctx.base.grid, ctx.base.ode_noise_term);
        const auto mc = estimate_objective(lm, p, &coeffs, ctx.sim(paths));
        checksums.push_back(mc.noise_checksum);
        double s = 0.0;
        for (const auto& ps : mc.path_summaries) s += std::abs(ps.x_T);
        mean_abs_xT.push_back(s / static_cast<double>(paths));
        ctx.dump_path(r.name, leg.name, simulate_path(lm, p, &coeffs, ctx.sim(1), 0));
        if (std::string(leg.name) == "constant") r.mc = mc;
    }

    claim(r, "shared-noise-checksums-equal",
          checksums[0] == checksums[1] && checksums[1] == checksums[2],
          "path-0 increment checksums across the three legs");
    bool magnitude = true;
    for (const double v : mean_abs_xT) magnitude = magnitude && v > 1.0 && v < 2000.0;
    claim(r, "final-position-magnitude", magnitude,
          "mean |x_T| per leg: " + num(mean_abs_xT[0]) + ", " + num(mean_abs_xT[1]) + ", " +
              num(mean_abs_xT[2]) + " shares (hundreds expected)");
    r.ran = true;
    return r;
}

// Whichever order type carries the lower temporary impact should trade faster.
ScenarioResult scenario_impact_asymmetry(const SuiteContext& ctx) {
    ScenarioResult r;
    r.name = "impact-asymmetry";
    auto m = baseline_model();
    m.m0 = p0_to_m0(m, 0.05);
    m.m1 = p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);

    struct Leg {
        const char* name;
        double eta1, eta2;
        bool limit_cheaper;
    };
    const Leg legs[] = {{"market-expensive", 0.1, 0.05, true},
                        {"limit-expensive", 0.05, 0.1, false}};

    bool all_ok = true;
    std::string detail;
    for (const auto& leg : legs) {
        ModelParams lm = m;
        lm.eta1 = leg.eta1;
        lm.eta2 = leg.eta2;
        const auto coeffs = solve_affine_numerical(lm, p, ctx.base.grid, ctx.base.ode_noise_term);
        for (std::uint64_t k = 0; k < 4; ++k) {
            const auto path = simulate_path(lm, p, &coeffs, ctx.sim(1), k);
            long win = 0, total = 0;
            for (size_t i = 0; i + 1 < path.t.size(); ++i) {
                ++total;
                const bool limit_faster = path.L[i] > path.v[i];
                if (limit_faster == leg.limit_cheaper) ++win;
            }
            const double frac = total ? static_cast<double>(win) / total : 0.0;
            if (frac < 0.95) all_ok = false;
            if (k == 0) {
                detail += std::string(leg.name) + ": " + num(frac) + " ";
                ctx.dump_path(r.name, leg.name, path);
            }
        }
    }
    claim(r, "cheaper-order-type-trades-faster", all_ok,
          "fraction of steps with the cheaper type faster (per leg, path 0): " + detail);
    r.ran = true;
    return r;
}

// Raising the non-liquidation penalty pushes final positions toward zero.
ScenarioResult scenario_beta_sweep(const SuiteContext& ctx) {
    ScenarioResult r;
    r.name = "beta-sweep";
    auto m = baseline_model();
    m.m0 = p0_to_m0(m, 0.05);
    m.m1 = p1_to_m1(m, 0.05);
    const int paths = std::max(ctx.base.sim.n_paths, 1000);

    double mean_abs[2] = {0.0, 0.0};
    const double betas[2] = {1e-4, 0.1};
    for (int k = 0; k < 2; ++k) {
        auto p = baseline_penalties(m);
        p.beta = betas[k];
        const auto coeffs = solve_affine_numerical(m, p, ctx.base.grid, ctx.base.ode_noise_term);
        const auto mc = estimate_objective(m, p, &coeffs, ctx.sim(paths));
        for (const auto& ps : mc.path_summaries) mean_abs[k] += std::abs(ps.x_T);
        mean_abs[k] /= static_cast<double>(paths);
        ctx.dump_path(r.name, k == 0 ? "beta-low" : "beta-high",
                      simulate_path(m, p, &coeffs, ctx.sim(1), 0));
        if (k == 0) r.mc = mc;
    }
    claim(r, "high-beta-liquidates-further", mean_abs[1] < mean_abs[0],
          "mean |x_T|: beta=1e-4 -> " + num(mean_abs[0]) + ", beta=0.1 -> " + num(mean_abs[1]));
    r.ran = true;
    return r;
}

// Buy-sell boundary pair: rho near zero flips the classification, larger beta
// shifts the whole curve down.
ScenarioResult scenario_boundary_pair(const SuiteContext& ctx) {
    ScenarioResult r;
    r.name = "boundary-pair";
    auto m = baseline_model();
    m.eta1 = m.eta2 = 0.1;
    m.m0 = p0_to_m0(m, 0.1);
    m.m1 = 0.0;

    const double rhos[2] = {-0.2, -0.0005};
    BoundaryShape shapes[2] = {};
    bool shift_down = true;
    double pT[2] = {};
    for (int k = 0; k < 2; ++k) {
        ModelParams lm = m;
        lm.rho = rhos[k];
        BoundaryProfile profiles[2];
        const double betas[2] = {1e-3, 0.1};
        for (int j = 0; j < 2; ++j) {
            auto p = baseline_penalties(lm);
            p.beta = betas[j];
            profiles[j] = buy_sell_boundary(lm, p, 720, ctx.base.ode_noise_term);
            ctx.dump_text(r.name,
                          std::string("boundary_rho") + num(rhos[k]) + "_beta" + num(betas[j]) +
                              ".csv",
                          profiles[j].to_csv());
        }
        shapes[k] = profiles[0].classification;
        pT[k] = profiles[0].terminal_target;
        for (size_t i = 0; i < profiles[0].P.size(); ++i)
            shift_down = shift_down && profiles[1].P[i] < profiles[0].P[i];
    }
    claim(r, "classification-flips-near-zero-rho", shapes[0] != shapes[1],
          std::string("rho=-0.2 -> ") + to_string(shapes[0]) +
              ", rho=-0.0005 -> " + to_string(shapes[1]));
    claim(r, "higher-beta-shifts-boundary-down", shift_down,
          "pointwise comparison at beta 1e-3 vs 0.1");
    claim(r, "terminal-target", std::abs(pT[0] - 0.05 / (2e-3 - 2.5e-7)) < 1e-12,
          "P(T) = eta0/(2 beta - gamma) = " + num(pT[0]));
    r.ran = true;
    return r;
}

// Schedule following with a small uniform weight, shared noise across legs.
ScenarioResult scenario_schedule(const SuiteContext& ctx) {
    ScenarioResult r;
    r.name = "schedule-following";
    auto m = baseline_model();
    m.m0 = p0_to_m0(m, 0.05);
    m.m1 = p1_to_m1(m, 0.05);
    const auto p = baseline_penalties(m);
    const int paths = std::max(std::min(ctx.base.sim.n_paths, 500), 100);
    const auto sched = ScheduleSpec::linear(m.x0, m.T);
    const auto quad = ScheduleSpec::quadratic(m.x0, m.T);
    const auto w = WeightSpec::constant(1e-4);

    const auto free_coeffs = solve_affine_numerical(m, p, ctx.base.grid, ctx.base.ode_noise_term);
    const auto lin_coeffs =
        solve_scheduled(m, p, sched, w, ctx.base.grid, ctx.base.ode_noise_term);
    const auto quad_coeffs =
        solve_scheduled(m, p, quad, w, ctx.base.grid, ctx.base.ode_noise_term);

    std::vector<SimPath> free_paths, lin_paths;
    for (int k = 0; k < paths; ++k) {
        free_paths.push_back(simulate_path(m, p, &free_coeffs, ctx.sim(1),
                                           static_cast<std::uint64_t>(k)));
        lin_paths.push_back(simulate_path(m, p, &lin_coeffs, ctx.sim(1),
                                          static_cast<std::uint64_t>(k), &sched, &w));
    }
    const auto free_err = tracking_error(free_paths, sched);
    const auto lin_err = tracking_error(lin_paths, sched);
    claim(r, "penalty-improves-tracking", lin_err.overall.mean_square < free_err.overall.mean_square,
          "mean-square tracking error vs linear target: w=0 -> " +
              num(free_err.overall.mean_square) + ", w=1e-4 -> " +
              num(lin_err.overall.mean_square));
    claim(r, "shared-noise-checksums-equal",
          free_paths[0].noise_checksum == lin_paths[0].noise_checksum,
          "same panel drives both legs");

    const auto quad_path =
        simulate_path(m, p, &quad_coeffs, ctx.sim(1), 0, &quad, &w);
    bool finite = std::isfinite(quad_path.x_T) && std::isfinite(quad_path.objective);
    for (const double a : quad_coeffs.a_nodes()) finite = finite && std::isfinite(a);
    claim(r, "quadratic-target-solves", finite, "coefficients and sample path stay finite");

    ctx.dump_path(r.name, "unscheduled", free_paths[0]);
    ctx.dump_path(r.name, "linear-schedule", lin_paths[0]);
    ctx.dump_path(r.name, "quadratic-schedule", quad_path);
    r.ran = true;
    return r;
}

}  // namespace

SuiteReport run_scenario_suite(const RunConfig& base, const std::string& out_dir) {
    SuiteContext ctx{base, fs::path(out_dir), !out_dir.empty()};
    if (ctx.writing) fs::create_directories(ctx.out_dir);

    SuiteReport report;
    using Fn = ScenarioResult (*)(const SuiteContext&);
    const Fn scenarios[] = {scenario_uncertainty_trio, scenario_impact_asymmetry,
                            scenario_beta_sweep, scenario_boundary_pair, scenario_schedule};
    const char* names[] = {"uncertainty-trio-shared-noise", "impact-asymmetry", "beta-sweep",
                           "boundary-pair", "schedule-following"};
    for (size_t i = 0; i < std::size(scenarios); ++i) {
        try {
            report.scenarios.push_back(scenarios[i](ctx));
        } catch (const std::exception& e) {
            ScenarioResult r;
            r.name = names[i];
            r.ran = false;
            r.error = e.what();
            report.scenarios.push_back(std::move(r));
        }
    }
    if (ctx.writing) write_text(ctx.out_dir / "suite_report.json", suite_report_json(report));
    return report;
}

std::string suite_report_json(const SuiteReport& report) {
    ordered_json scenarios = ordered_json::array();
    for (const auto& s : report.scenarios) {
        ordered_json j;
        j["scenario"] = s.name;
        j["ran"] = s.ran;
        if (!s.error.empty()) j["error"] = s.error;
        ordered_json claims = ordered_json::array();
        for (const auto& c : s.claims) {
            ordered_json cj;
            cj["claim"] = c.name;
            cj["pass"] = c.pass;
            cj["detail"] = c.detail;
            claims.push_back(cj);
        }
        j["claims"] = claims;
        scenarios.push_back(j);
    }
    ordered_json root;
    root["version"] = kVersion;
    root["all_ran"] = report.all_ran();
    root["all_claims_pass"] = report.all_claims_pass();
    root["scenarios"] = scenarios;
    return root.dump(2) + "\n";
}

}  // namespace optexec

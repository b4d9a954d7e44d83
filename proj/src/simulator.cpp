#include "exec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "exec/error.hpp"
#include "exec/rng.hpp"

namespace optexec {

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::optimal: return "optimal";
        case PolicyKind::infinite_limit: return "infinite-limit";
        case PolicyKind::twap: return "twap";
        case PolicyKind::custom: return "custom";
    }
    return "?";
}

std::string SimPath::to_csv() const {
    std::string header = "t,x,S,Stilde,v,L";
    if (!P.empty()) header += ",P";
    if (!Q.empty()) header += ",Q";
    header += "\n";
    std::string out = header;
    char buf[256];
    for (size_t i = 0; i < t.size(); ++i) {
        int len = std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", t[i],
                                x[i], S[i], Stilde[i], v[i], L[i]);
        out.append(buf, static_cast<size_t>(len));
        if (!P.empty()) {
            len = std::snprintf(buf, sizeof(buf), ",%.17g", P[i]);
            out.append(buf, static_cast<size_t>(len));
        }
        if (!Q.empty()) {
            len = std::snprintf(buf, sizeof(buf), ",%.17g", Q[i]);
            out.append(buf, static_cast<size_t>(len));
        }
        out += '\n';
    }
    return out;
}

namespace {

constexpr std::uint64_t kLaneNoise = 0;   // (dW, dZ) increments
constexpr std::uint64_t kLanePolicy = 1;  // rate randomization

struct RateSupplier {
    const RatePolicy& policy;
    const ModelParams& model;
    const PenaltyParams& pen;
    const ValueCoefficients* coeffs;

    std::pair<double, double> operator()(double t, double x) const {
        switch (policy.kind) {
            case PolicyKind::optimal: {
                const auto e = optimal_controls(*coeffs, model, pen, t, x);
                return {e.v_star, e.l_star};
            }
            case PolicyKind::infinite_limit:
                return infinite_uncertainty_policy(model, pen, t, x);
            case PolicyKind::twap: {
                const double total = model.x0 / model.T;
                return {policy.twap_market_fraction * total,
                        (1.0 - policy.twap_market_fraction) * total};
            }
            case PolicyKind::custom:
                return policy.custom(t, x);
        }
        return {0.0, 0.0};
    }
};

}  // namespace

SimPath simulate_path(const ModelParams& model, const PenaltyParams& pen,
                      const ValueCoefficients* coeffs, const SimConfig& cfg,
                      std::uint64_t path_index, const ScheduleSpec* sched,
                      const WeightSpec* weight, bool record) {
    if (cfg.n_steps < 1 || cfg.record_every < 1)
        throw Error(ErrorKind::invalid, "simulate_path: n_steps >= 1, record_every >= 1");
    if (cfg.policy.kind == PolicyKind::optimal && coeffs == nullptr)
        throw Error(ErrorKind::invalid, "simulate_path: optimal policy needs coefficients");
    if (cfg.policy.kind == PolicyKind::custom && !cfg.policy.custom)
        throw Error(ErrorKind::invalid, "simulate_path: custom policy has no rate function");

    const int n = cfg.n_steps;
    const double dt = model.T / n;
    const double sdt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - model.rho * model.rho);
    const PathRng rng(cfg.seed, path_index);
    const RateSupplier rates{cfg.policy, model, pen, coeffs};
    NoiseChecksum checksum;

    // Boundary column: constant uncertainty with both rate coefficients
    // negative, from the coefficients actually used by the policy.
    const bool has_boundary =
        coeffs != nullptr && model.m1 == 0.0 &&
        (model.eta1 - model.eta2 - 2.0 * pen.beta2 - pen.alpha < 0.0) &&
        (model.eta2 - model.eta1 - pen.alpha - 2.0 * pen.beta1 < 0.0);

    SimPath out;
    const size_t cap = record ? static_cast<size_t>(n / cfg.record_every) + 2 : 0;
    if (record) {
        out.t.reserve(cap);
        out.x.reserve(cap);
        out.S.reserve(cap);
        out.Stilde.reserve(cap);
        out.v.reserve(cap);
        out.L.reserve(cap);
        if (has_boundary) out.P.reserve(cap);
        if (sched) out.Q.reserve(cap);
    }

    double x = model.x0, S = model.S0;
    double trading_cash = 0.0;  // sum (S+h) dx
    double g_int = 0.0, pen_int = 0.0, sched_int = 0.0;
    double exp_quadvar = 0.0, exp_drift = 0.0, exp_corr = 0.0, exp_cost = 0.0;
    double exp_mart_w = 0.0, exp_mart_z = 0.0;

    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        const auto [n1, n2] = rng.normal_pair(kLaneNoise, static_cast<std::uint64_t>(i));
        const double dW = sdt * n1;
        const double dZ = sdt * (model.rho * n1 + rho_c * n2);
        checksum.add(dW);
        checksum.add(dZ);

        auto [v, L] = rates(t, x);
        if (cfg.policy.rate_noise > 0.0) {
            const double u1 = rng.u01(kLanePolicy, 2 * static_cast<std::uint64_t>(i));
            const double u2 = rng.u01(kLanePolicy, 2 * static_cast<std::uint64_t>(i) + 1);
            v *= 1.0 + cfg.policy.rate_noise * (2.0 * u1 - 1.0);
            L *= 1.0 + cfg.policy.rate_noise * (2.0 * u2 - 1.0);
        }

        const double m = model.fill_noise(L);
        const double h = model.temp_impact(v, L);
        const double g = model.mu * x + model.rho * model.sigma * m + 0.5 * model.gamma * m * m +
                         h * (v + L) + pen.alpha * v * L + pen.beta1 * (pen.R1 - v * v) +
                         pen.beta2 * (pen.R2 - L * L);

        if (v * v > pen.R1) ++out.steps_cap_exceeded_v;
        if (L * L > pen.R2) ++out.steps_cap_exceeded_l;
        if (v * L < 0.0) ++out.steps_sign_mismatch;

        double boundary = 0.0;
        if (has_boundary) {
            boundary = -(coeffs->b(t) + model.eta0) / (2.0 * coeffs->a(t));
            if (x < boundary) ++out.steps_below_boundary;
        }

        if (record && i % cfg.record_every == 0) {
            out.t.push_back(t);
            out.x.push_back(x);
            out.S.push_back(S);
            out.Stilde.push_back(S + h);
            out.v.push_back(v);
            out.L.push_back(L);
            if (has_boundary) out.P.push_back(boundary);
            if (sched) out.Q.push_back((*sched)(t));
        }

        const double dx = -(v + L) * dt + m * dZ;
        const double dS = model.gamma * dx + model.mu * dt + model.sigma * dW;

        trading_cash += (S + h) * dx;
        g_int += g * dt;
        pen_int += (pen.alpha * v * L + pen.beta1 * (pen.R1 - v * v) +
                    pen.beta2 * (pen.R2 - L * L)) *
                   dt;
        if (weight && sched) {
            const double dev = x - (*sched)(t);
            sched_int += -(*weight)(t)*dev * dev * dt;
        }

        // Expanded-form ledger. The quadratic-variation and drift entries use
        // the discrete-exact counterparts (sum (dx)^2 / right-point x) so the
        // two PNL routes coincide identically on noise-free paths.
        exp_quadvar += 0.5 * model.gamma * dx * dx;
        exp_drift += model.mu * (x + dx) * dt;
        exp_corr += model.rho * model.sigma * m * dt;
        exp_cost += h * (v + L) * dt;
        exp_mart_w += model.sigma * x * dW;
        exp_mart_z += -h * m * dZ;

        x += dx;
        S += dS;
    }

    if (record) {
        // Final node; rates are left-point quantities, repeat the last pair.
        const double hv = out.v.empty() ? 0.0 : out.v.back();
        const double hl = out.L.empty() ? 0.0 : out.L.back();
        out.t.push_back(model.T);
        out.x.push_back(x);
        out.S.push_back(S);
        out.Stilde.push_back(S + model.temp_impact(hv, hl));
        out.v.push_back(hv);
        out.L.push_back(hl);
        if (has_boundary)
            out.P.push_back(-(coeffs->b(model.T) + model.eta0) / (2.0 * coeffs->a(model.T)));
        if (sched) out.Q.push_back((*sched)(model.T));
    }

    out.x_T = x;
    out.S_T = S;
    out.noise_checksum = checksum.value();
    out.pnl_direct = x * S - model.x0 * model.S0 - trading_cash;
    out.pnl_expanded = 0.5 * model.gamma * (x * x - model.x0 * model.x0) + exp_quadvar +
                       exp_drift + exp_corr + exp_cost + exp_mart_w + exp_mart_z;
    out.g_integral = g_int;
    out.penalty_integral = pen_int;
    out.schedule_penalty_integral = sched_int;
    out.terminal_penalty = -pen.beta * x * x;
    out.compensated_pnl = out.pnl_direct + pen_int + out.terminal_penalty;
    // Matches the coefficient normalization V(t,x) = a x^2 + b x + c with
    // terminal value (gamma/2 - beta) x^2: the objective sample estimates
    // a(0) x0^2 + b(0) x0 + c(0). (The mark-to-market constant gamma/2 x0^2 of
    // the initial inventory is not subtracted here or there.)
    out.objective = out.terminal_penalty + 0.5 * model.gamma * x * x + g_int + sched_int;
    return out;
}

double pnl_consistency(const SimPath& path) {
    return std::abs(path.pnl_direct - path.pnl_expanded);
}

MCResult estimate_objective(const ModelParams& model, const PenaltyParams& pen,
                            const ValueCoefficients* coeffs, const SimConfig& cfg,
                            const ScheduleSpec* sched, const WeightSpec* weight) {
    if (cfg.n_paths < 1) throw Error(ErrorKind::invalid, "estimate_objective: n_paths >= 1");

    MCResult res;
    res.path_summaries.resize(static_cast<size_t>(cfg.n_paths));

    unsigned hw = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                  : std::max(1u, std::thread::hardware_concurrency());
    hw = std::min<unsigned>({hw, 16u, static_cast<unsigned>(cfg.n_paths)});

    std::uint64_t checksum0 = 0;
    auto run_range = [&](int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            const auto path = simulate_path(model, pen, coeffs, cfg,
                                            static_cast<std::uint64_t>(p), sched, weight,
                                            /*record=*/false);
            res.path_summaries[static_cast<size_t>(p)] = {path.pnl_direct, path.compensated_pnl,
                                                          path.x_T, path.objective};
            if (p == 0) checksum0 = path.noise_checksum;
        }
    };

    if (hw <= 1) {
        run_range(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (cfg.n_paths + static_cast<int>(hw) - 1) / static_cast<int>(hw);
        for (unsigned k = 0; k < hw; ++k) {
            const int lo = static_cast<int>(k) * chunk;
            const int hi = std::min(cfg.n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Ordered reduction by path index.
    double sum = 0.0, sum_x = 0.0, sum_pnl = 0.0, sum_comp = 0.0;
    for (const auto& s : res.path_summaries) {
        sum += s.objective;
        sum_x += s.x_T;
        sum_pnl += s.pnl;
        sum_comp += s.compensated_pnl;
    }
    const double n = static_cast<double>(cfg.n_paths);
    res.mean_objective = sum / n;
    res.mean_final_position = sum_x / n;
    res.mean_pnl = sum_pnl / n;
    res.mean_compensated_pnl = sum_comp / n;
    double ss = 0.0;
    for (const auto& s : res.path_summaries) {
        const double d = s.objective - res.mean_objective;
        ss += d * d;
    }
    res.stderr_objective = cfg.n_paths > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    res.noise_checksum = checksum0;
    return res;
}

}  // namespace optexec

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exec/params.hpp"
#include "exec/policy.hpp"
#include "exec/schedule.hpp"
#include "exec/value_ode.hpp"

namespace optexec {

enum class PolicyKind { optimal, infinite_limit, twap, custom };

const char* to_string(PolicyKind kind);

// Rate supplier for the simulator. `rate_noise` multiplies both rates by
// independent per-step factors 1 + amp*(2u-1) drawn from a dedicated RNG lane
// (used by the suboptimal-policy dominance experiments).
struct RatePolicy {
    PolicyKind kind = PolicyKind::optimal;
    double twap_market_fraction = 0.5;  // share of the average rate sent as market orders
    double rate_noise = 0.0;
    std::function<std::pair<double, double>(double t, double x)> custom;
};

struct SimConfig {
    int n_steps = 3600;
    int n_paths = 1;
    std::uint64_t seed = 1;
    RatePolicy policy;
    int record_every = 1;  // thinning of the recorded trajectory
    int threads = 0;       // 0 = hardware default; result is thread-count invariant
};

// One simulated execution with its full PNL ledger. The two PNL columns are
// the same quantity accumulated along both routes: directly as
// x_T S_T - x_0 S_0 - sum (S+h) dx, and through the expanded decomposition;
// they differ only by the Ito cross terms of the discretization, O(dt^1/2)
// pathwise and exactly zero without noise.
struct SimPath {
    std::vector<double> t, x, S, Stilde, v, L;  // recorded nodes
    std::vector<double> P;                      // boundary column, when defined
    std::vector<double> Q;                      // schedule column, when defined

    double pnl_direct = 0.0;
    double pnl_expanded = 0.0;
    double compensated_pnl = 0.0;          // pnl_direct + penalty integral + terminal penalty
    double g_integral = 0.0;               // int g(x,v,L) dt
    double penalty_integral = 0.0;         // int [alpha v L + beta1(R1-v^2) + beta2(R2-L^2)] dt
    double schedule_penalty_integral = 0.0;  // int -w (x-Q)^2 dt  (<= 0)
    double terminal_penalty = 0.0;         // -beta x_T^2
    double objective = 0.0;  // terminal_penalty + gamma/2 x_T^2 + int (g + lambda) dt
    double x_T = 0.0;
    double S_T = 0.0;

    std::uint64_t noise_checksum = 0;  // FNV-1a over the (dW, dZ) stream
    long steps_cap_exceeded_v = 0;
    long steps_cap_exceeded_l = 0;
    long steps_sign_mismatch = 0;   // sign(v) != sign(L), both nonzero
    long steps_below_boundary = 0;  // x < P(t), when the boundary is defined

    std::string to_csv() const;  // columns: t,x,S,Stilde,v,L[,P][,Q]
};

struct PathSummary {
    double pnl = 0.0;
    double compensated_pnl = 0.0;
    double x_T = 0.0;
    double objective = 0.0;
};

struct MCResult {
    double mean_objective = 0.0;
    double stderr_objective = 0.0;  // sample std / sqrt(n_paths)
    double mean_final_position = 0.0;
    double mean_pnl = 0.0;
    double mean_compensated_pnl = 0.0;
    std::vector<PathSummary> path_summaries;
    std::uint64_t noise_checksum = 0;  // path 0 stream checksum
};

// Euler-Maruyama on dx = -(v+L) dt + m(L) dZ, dS = gamma dx + mu dt + sigma dW
// with corr(dZ, dW) = rho built as dZ = rho n1 + sqrt(1-rho^2) n2. Rates are
// evaluated at the left endpoint of every step and applied as computed (no
// clamping). `coeffs` is required for the optimal policy and for the boundary
// column; `sched` adds the schedule column and the deviation-penalty ledger.
SimPath simulate_path(const ModelParams& model, const PenaltyParams& pen,
                      const ValueCoefficients* coeffs, const SimConfig& cfg,
                      std::uint64_t path_index, const ScheduleSpec* sched = nullptr,
                      const WeightSpec* weight = nullptr, bool record = true);

// |pnl_direct - pnl_expanded| for a completed path.
double pnl_consistency(const SimPath& path);

// Monte Carlo estimate of the objective E[f(x_T) + gamma/2 x_T^2 +
// int (g + lambda) dt], which the optimal policy attains as
// V(0, x0) = a(0) x0^2 + b(0) x0 + c(0). Paths run in parallel; the reduction
// is ordered by path index, so results are bitwise reproducible for a given
// (seed, n_steps, n_paths) regardless of thread count.
MCResult estimate_objective(const ModelParams& model, const PenaltyParams& pen,
                            const ValueCoefficients* coeffs, const SimConfig& cfg,
                            const ScheduleSpec* sched = nullptr,
                            const WeightSpec* weight = nullptr);

}  // namespace optexec

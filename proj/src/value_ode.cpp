#include "exec/value_ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "exec/error.hpp"

namespace optexec {

const char* to_string(CoeffSource source) {
    switch (source) {
        case CoeffSource::closed_form_constant: return "closed-form-constant";
        case CoeffSource::closed_form_linear: return "closed-form-linear";
        case CoeffSource::closed_form_infinite: return "closed-form-infinite";
        case CoeffSource::numerical_affine: return "numerical-affine";
        case CoeffSource::numerical_scheduled: return "numerical-scheduled";
    }
    return "?";
}

ValueCoefficients::ValueCoefficients(std::vector<double> t, std::vector<double> a,
                                     std::vector<double> b, std::vector<double> c,
                                     CoeffSource source, NoiseSource noise, std::vector<double> w,
                                     std::vector<double> q)
    : t_(std::move(t)),
      a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      w_(std::move(w)),
      q_(std::move(q)),
      sa_(t_, a_),
      sb_(t_, b_),
      sc_(t_, c_),
      source_(source),
      noise_(noise) {}

namespace {

double lin_interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        (xs[mid] <= x ? lo : hi) = mid;
    }
    const double u = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
    return ys[lo] + u * (ys[lo + 1] - ys[lo]);
}

}  // namespace

double ValueCoefficients::weight_at(double t) const {
    return w_.empty() ? 0.0 : lin_interp(t_, w_, t);
}

double ValueCoefficients::target_at(double t) const {
    return q_.empty() ? 0.0 : lin_interp(t_, q_, t);
}

std::string ValueCoefficients::to_csv() const {
    std::string out = "t,a,b,c\n";
    char line[128];
    for (size_t i = 0; i < t_.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", t_[i], a_[i], b_[i], c_[i]);
        out += line;
    }
    return out;
}

namespace {

// Shared pieces of the coefficient system. The correlation source in the b/c
// equations is N(a) = m0*m1*(2a+gamma) + rho*sigma*m_sel with m_sel chosen by
// the NoiseSource toggle; the control formulas always use the m1 reading.
struct OdeContext {
    double mu, eta0, gamma, m0, m1, rho_sigma_sel, rho_sigma_m0;
    double e1b1;       // eta1 + beta1
    double sum_ab;     // alpha + beta1 + beta2
    double E;          // eta2 - eta1 - alpha - 2*beta1
    double C;
    double m1sq, m0m1;
    double pen_const;  // beta1*R1 + beta2*R2
    double guard;      // abort when C - psi <= guard

    OdeContext(const ModelParams& m, const PenaltyParams& p, NoiseSource noise) {
        mu = m.mu;
        eta0 = m.eta0;
        gamma = m.gamma;
        m0 = m.m0;
        m1 = m.m1;
        rho_sigma_m0 = m.rho * m.sigma * m.m0;
        rho_sigma_sel = m.rho * m.sigma * (noise == NoiseSource::m0 ? m.m0 : m.m1);
        e1b1 = m.eta1 + p.beta1;
        sum_ab = p.alpha + p.beta1 + p.beta2;
        E = m.eta2 - m.eta1 - p.alpha - 2.0 * p.beta1;
        C = compute_C(m, p);
        m1sq = m.m1 * m.m1;
        m0m1 = m.m0 * m.m1;
        pen_const = p.beta1 * p.R1 + p.beta2 * p.R2;
        guard = 1e-12 * std::abs(C);
    }

    double psi(double a) const { return m1sq * (2.0 * a + gamma); }
    double N(double a) const { return m0m1 * (2.0 * a + gamma) + rho_sigma_sel; }

    double denom(double a, double t) const {
        const double d = C - psi(a);
        if (!(d > guard)) {
            std::ostringstream os;
            os << "concavity denominator breached at t = " << t << " (C - m1^2(2a+gamma) = " << d
               << ")";
            throw Error(ErrorKind::solver, os.str());
        }
        return d;
    }

    // da/dt
    double fa(double a, double t, double w) const {
        const double d = denom(a, t);
        return -(2.0 * sum_ab - psi(a)) * a * a / (e1b1 * d) + w;
    }

    // db/dt
    double fb(double a, double b, double t, double w, double q) const {
        const double d = denom(a, t);
        return -mu - (2.0 * sum_ab - psi(a)) * a * (b + eta0) / (e1b1 * d) -
               E * N(a) * a / (e1b1 * d) - 2.0 * w * q;
    }

    // -dc/dt, i.e. the integrand of c(t) = int_t^T source(u) du
    double c_source(double a, double b, double t, double w, double q) const {
        const double d = denom(a, t);
        const double f = b + eta0;
        const double n = N(a);
        return 0.5 * m0 * m0 * (2.0 * a + gamma) + rho_sigma_m0 + pen_const +
               (2.0 * sum_ab - psi(a)) * f * f / (4.0 * e1b1 * d) +
               E * n * f / (2.0 * e1b1 * d) + n * n / (2.0 * d) - w * q * q;
    }
};

struct ScheduleSamples {
    // w and Q on the step/4 subgrid (4N+1 nodes); empty when unscheduled.
    std::vector<double> w, q;
    bool active = false;

    double w_at(size_t quarter_idx) const { return active ? w[quarter_idx] : 0.0; }
    double q_at(size_t quarter_idx) const { return active ? q[quarter_idx] : 0.0; }
};

std::vector<double> uniform_grid(double T, int n) {
    std::vector<double> t(static_cast<size_t>(n) + 1);
    const double h = T / n;
    for (int i = 0; i <= n; ++i) t[static_cast<size_t>(i)] = i * h;
    t.back() = T;
    return t;
}

// Backward RK4 over the triangular (a, b) system plus Simpson quadrature for
// c. a is produced on the step/4 subgrid so that the b stages and the c
// midpoints read exact nodes rather than interpolants.
ValueCoefficients integrate_system(const ModelParams& model, const PenaltyParams& pen,
                                   int grid_size, NoiseSource noise,
                                   const ScheduleSamples& sched, CoeffSource source) {
    if (grid_size < 2) throw Error(ErrorKind::invalid, "solver: grid_size must be >= 2");
    const int n = grid_size;
    const double T = model.T;
    const double h = T / n;
    if (!(h > 0.0) || T - h == T)
        throw Error(ErrorKind::solver, "solver: step size underflow");

    const OdeContext ctx(model, pen, noise);
    const double aT = model.gamma / 2.0 - pen.beta;

    // Pass 1: a on the quarter grid, backward from a(T).
    const size_t nq = 4 * static_cast<size_t>(n);
    std::vector<double> aq(nq + 1);
    aq[nq] = aT;
    const double hq = -h / 4.0;  // backward step
    for (size_t i = nq; i > 0; --i) {
        const double t = T + (static_cast<double>(i) - 4.0 * n) * (h / 4.0);
        const double w0 = sched.w_at(i), wm = 0.5 * (sched.w_at(i) + sched.w_at(i - 1)),
                     w1 = sched.w_at(i - 1);
        const double y = aq[i];
        const double k1 = ctx.fa(y, t, w0);
        const double k2 = ctx.fa(y + 0.5 * hq * k1, t + 0.5 * hq, wm);
        const double k3 = ctx.fa(y + 0.5 * hq * k2, t + 0.5 * hq, wm);
        const double k4 = ctx.fa(y + hq * k3, t + hq, w1);
        aq[i - 1] = y + hq / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(aq[i - 1]))
            throw Error(ErrorKind::solver,
                        "coefficient integration diverged near t = " + std::to_string(t + hq) +
                            "; the grid step is too large for the stiffness of this "
                            "weight/uncertainty scale");
    }

    // Pass 2: b on the half grid, backward from b(T) = 0, with a read off the
    // quarter grid at the stage times.
    const size_t nh = 2 * static_cast<size_t>(n);
    std::vector<double> bh(nh + 1);
    bh[nh] = 0.0;
    const double hh = -h / 2.0;
    for (size_t i = nh; i > 0; --i) {
        const double t = T + (static_cast<double>(i) - 2.0 * n) * (h / 2.0);
        const size_t q2 = 2 * i;  // quarter-grid index of t
        const double a0 = aq[q2], am = aq[q2 - 1], a1 = aq[q2 - 2];
        const double w0 = sched.w_at(q2), wm = sched.w_at(q2 - 1), w1 = sched.w_at(q2 - 2);
        const double Q0 = sched.q_at(q2), Qm = sched.q_at(q2 - 1), Q1 = sched.q_at(q2 - 2);
        const double y = bh[i];
        const double k1 = ctx.fb(a0, y, t, w0, Q0);
        const double k2 = ctx.fb(am, y + 0.5 * hh * k1, t + 0.5 * hh, wm, Qm);
        const double k3 = ctx.fb(am, y + 0.5 * hh * k2, t + 0.5 * hh, wm, Qm);
        const double k4 = ctx.fb(a1, y + hh * k3, t + hh, w1, Q1);
        bh[i - 1] = y + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // Pass 3: c by per-interval Simpson on the output grid, backward from 0.
    auto grid = uniform_grid(T, n);
    std::vector<double> a(n + 1), b(n + 1), c(n + 1);
    for (int i = 0; i <= n; ++i) {
        a[static_cast<size_t>(i)] = aq[4 * static_cast<size_t>(i)];
        b[static_cast<size_t>(i)] = bh[2 * static_cast<size_t>(i)];
    }
    a[static_cast<size_t>(n)] = aT;  // bitwise terminal values
    b[static_cast<size_t>(n)] = 0.0;
    c[static_cast<size_t>(n)] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const size_t iu = static_cast<size_t>(i);
        const double t0 = grid[iu], t1 = grid[iu + 1], tm = t0 + 0.5 * h;
        const size_t q0 = 4 * iu, qm = q0 + 2, q1 = q0 + 4;
        const double s0 = ctx.c_source(aq[q0], bh[2 * iu], t0, sched.w_at(q0), sched.q_at(q0));
        const double sm =
            ctx.c_source(aq[qm], bh[2 * iu + 1], tm, sched.w_at(qm), sched.q_at(qm));
        const double s1 =
            ctx.c_source(aq[q1], bh[2 * iu + 2], t1, sched.w_at(q1), sched.q_at(q1));
        c[iu] = c[iu + 1] + h / 6.0 * (s0 + 4.0 * sm + s1);
    }

    // Post-solve invariants.
    if (pen.beta > model.gamma / 2.0) {
        for (int i = 0; i <= n; ++i)
            if (!(a[static_cast<size_t>(i)] < 0.0))
                throw Error(ErrorKind::solver,
                            "a(t) lost negativity at t = " + std::to_string(grid[static_cast<size_t>(i)]));
    }
    for (int i = 0; i <= n; ++i)
        if (!second_order_condition(a[static_cast<size_t>(i)], model, pen))
            throw Error(ErrorKind::solver,
                        "second-order condition breached at t = " +
                            std::to_string(grid[static_cast<size_t>(i)]));

    std::vector<double> w_out, q_out;
    if (sched.active) {
        w_out.resize(static_cast<size_t>(n) + 1);
        q_out.resize(static_cast<size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) {
            w_out[static_cast<size_t>(i)] = sched.w[4 * static_cast<size_t>(i)];
            q_out[static_cast<size_t>(i)] = sched.q[4 * static_cast<size_t>(i)];
        }
    }
    return ValueCoefficients(std::move(grid), std::move(a), std::move(b), std::move(c), source,
                             noise, std::move(w_out), std::move(q_out));
}

}  // namespace

ValueCoefficients solve_affine_numerical(const ModelParams& model, const PenaltyParams& pen,
                                         int grid_size, NoiseSource noise) {
    require_valid(model, pen,
                  model.m1 == 0.0 ? UncertaintyMode::constant : UncertaintyMode::affine);
    return integrate_system(model, pen, grid_size, noise, {}, CoeffSource::numerical_affine);
}

ValueCoefficients solve_constant_closed_form(const ModelParams& model, const PenaltyParams& pen,
                                             int grid_size, NoiseSource noise) {
    if (model.m1 != 0.0)
        throw Error(ErrorKind::invalid, "constant closed form requires m1 = 0");
    require_valid(model, pen, UncertaintyMode::constant);
    if (grid_size < 2) throw Error(ErrorKind::invalid, "solver: grid_size must be >= 2");

    const OdeContext ctx(model, pen, noise);
    const double T = model.T;
    const double tc = t_crit(model, pen);
    const double two_bg = 2.0 * pen.beta - model.gamma;
    const double n0 = ctx.rho_sigma_sel;  // constant here since m1 = 0

    auto a_of = [&](double t) { return -ctx.e1b1 * ctx.C / (2.0 * ctx.sum_ab * (tc - t)); };
    auto b0_of = [&](double t) {
        const double quad = ctx.sum_ab * ctx.mu / (ctx.e1b1 * ctx.C) *
                            ((tc - t) * (tc - t) - (tc - T) * (tc - T));
        return quad - ctx.E * n0 * (T - t) / (ctx.e1b1 * ctx.C);
    };
    auto b_of = [&](double t) {
        return -ctx.eta0 - a_of(t) * (2.0 * ctx.eta0 / two_bg + b0_of(t));
    };

    const int n = grid_size;
    const double h = T / n;
    auto grid = uniform_grid(T, n);
    std::vector<double> a(n + 1), b(n + 1), c(n + 1);
    for (int i = 0; i < n; ++i) {
        a[static_cast<size_t>(i)] = a_of(grid[static_cast<size_t>(i)]);
        b[static_cast<size_t>(i)] = b_of(grid[static_cast<size_t>(i)]);
    }
    a[static_cast<size_t>(n)] = model.gamma / 2.0 - pen.beta;
    b[static_cast<size_t>(n)] = 0.0;
    c[static_cast<size_t>(n)] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const size_t iu = static_cast<size_t>(i);
        const double t0 = grid[iu], t1 = grid[iu + 1], tm = t0 + 0.5 * h;
        const double s0 = ctx.c_source(a[iu], b[iu], t0, 0.0, 0.0);
        const double sm = ctx.c_source(a_of(tm), b_of(tm), tm, 0.0, 0.0);
        const double s1 = ctx.c_source(a[iu + 1], b[iu + 1], t1, 0.0, 0.0);
        c[iu] = c[iu + 1] + h / 6.0 * (s0 + 4.0 * sm + s1);
    }
    return ValueCoefficients(std::move(grid), std::move(a), std::move(b), std::move(c),
                             CoeffSource::closed_form_constant, noise);
}

namespace {

// Shared by the linear closed form and the infinite-uncertainty limit, which
// have identical a(t) and b(t).
void fill_linear_a_b(const ModelParams& model, const PenaltyParams& pen,
                     const std::vector<double>& grid, std::vector<double>& a,
                     std::vector<double>& b) {
    const double T = model.T;
    const double e1b1 = model.eta1 + pen.beta1;
    const double two_bg = 2.0 * pen.beta - model.gamma;
    const size_t n = grid.size() - 1;
    for (size_t i = 0; i < n; ++i) {
        const double tt = T - grid[i];
        const double av = -e1b1 * two_bg / (2.0 * e1b1 + tt * two_bg);
        a[i] = av;
        b[i] = -model.eta0 -
               av * (2.0 * model.eta0 / two_bg + 2.0 * model.mu * tt / two_bg +
                     model.mu * tt * tt / (2.0 * e1b1));
    }
    a[n] = model.gamma / 2.0 - pen.beta;
    b[n] = 0.0;
}

double linear_a_of(const ModelParams& model, const PenaltyParams& pen, double t) {
    const double e1b1 = model.eta1 + pen.beta1;
    const double two_bg = 2.0 * pen.beta - model.gamma;
    return -e1b1 * two_bg / (2.0 * e1b1 + (model.T - t) * two_bg);
}

double linear_b_of(const ModelParams& model, const PenaltyParams& pen, double t) {
    const double e1b1 = model.eta1 + pen.beta1;
    const double two_bg = 2.0 * pen.beta - model.gamma;
    const double tt = model.T - t;
    return -model.eta0 - linear_a_of(model, pen, t) *
                             (2.0 * model.eta0 / two_bg + 2.0 * model.mu * tt / two_bg +
                              model.mu * tt * tt / (2.0 * e1b1));
}

}  // namespace

ValueCoefficients solve_linear_closed_form(const ModelParams& model, const PenaltyParams& pen,
                                           int grid_size) {
    if (model.m0 != 0.0)
        throw Error(ErrorKind::invalid, "linear closed form requires m0 = 0");
    if (model.m1 <= 0.0)
        throw Error(ErrorKind::invalid, "linear closed form requires m1 > 0");
    const double C = compute_C(model, pen);
    const double lhs = 2.0 * (pen.alpha + pen.beta1 + pen.beta2);
    if (std::abs(lhs - C) > 1e-10 * std::max(std::abs(C), 1.0))
        throw Error(ErrorKind::validity,
                    "linear closed form requires 2(alpha+beta1+beta2) = C; "
                    "apply enforce_explicit_linear_condition first");
    require_valid(model, pen, UncertaintyMode::linear);
    const double floor = beta_floor(model, pen, model.T);
    if (!(pen.beta > floor))
        throw Error(ErrorKind::validity,
                    "linear closed form requires beta > beta_floor = " + std::to_string(floor));
    const auto tm = t_max(model, pen);
    if (!tm.unbounded && !(model.T < tm.value))
        throw Error(ErrorKind::validity,
                    "linear closed form requires T < T_max = " + std::to_string(tm.value));
    if (grid_size < 2) throw Error(ErrorKind::invalid, "solver: grid_size must be >= 2");

    const OdeContext ctx(model, pen, NoiseSource::m0);  // source term vanishes with m0 = 0
    const int n = grid_size;
    const double h = model.T / n;
    auto grid = uniform_grid(model.T, n);
    std::vector<double> a(n + 1), b(n + 1), c(n + 1);
    fill_linear_a_b(model, pen, grid, a, b);
    c[static_cast<size_t>(n)] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const size_t iu = static_cast<size_t>(i);
        const double t0 = grid[iu], t1 = grid[iu + 1], tm_ = t0 + 0.5 * h;
        const double s0 = ctx.c_source(a[iu], b[iu], t0, 0.0, 0.0);
        const double sm = ctx.c_source(linear_a_of(model, pen, tm_), linear_b_of(model, pen, tm_),
                                       tm_, 0.0, 0.0);
        const double s1 = ctx.c_source(a[iu + 1], b[iu + 1], t1, 0.0, 0.0);
        c[iu] = c[iu + 1] + h / 6.0 * (s0 + 4.0 * sm + s1);
    }
    return ValueCoefficients(std::move(grid), std::move(a), std::move(b), std::move(c),
                             CoeffSource::closed_form_linear, NoiseSource::m0);
}

ValueCoefficients solve_infinite_limit_closed_form(const ModelParams& model,
                                                   const PenaltyParams& pen, int grid_size) {
    if (model.m0 != 0.0)
        throw Error(ErrorKind::invalid, "infinite-uncertainty limit requires m0 = 0");
    require_valid(model, pen, UncertaintyMode::infinite_limit);
    if (grid_size < 2) throw Error(ErrorKind::invalid, "solver: grid_size must be >= 2");

    const double e1b1 = model.eta1 + pen.beta1;
    const double pen_const = pen.beta1 * pen.R1 + pen.beta2 * pen.R2;
    auto source = [&](double t, double b) {
        const double f = b + model.eta0;
        return pen_const + f * f / (4.0 * e1b1);
    };

    const int n = grid_size;
    const double h = model.T / n;
    auto grid = uniform_grid(model.T, n);
    std::vector<double> a(n + 1), b(n + 1), c(n + 1);
    fill_linear_a_b(model, pen, grid, a, b);
    c[static_cast<size_t>(n)] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const size_t iu = static_cast<size_t>(i);
        const double t0 = grid[iu], t1 = grid[iu + 1], tm = t0 + 0.5 * h;
        const double s0 = source(t0, b[iu]);
        const double sm = source(tm, linear_b_of(model, pen, tm));
        const double s1 = source(t1, b[iu + 1]);
        c[iu] = c[iu + 1] + h / 6.0 * (s0 + 4.0 * sm + s1);
    }
    return ValueCoefficients(std::move(grid), std::move(a), std::move(b), std::move(c),
                             CoeffSource::closed_form_infinite, NoiseSource::m0);
}

ValueCoefficients solve_scheduled(const ModelParams& model, const PenaltyParams& pen,
                                  const ScheduleSpec& sched, const WeightSpec& weight,
                                  int grid_size, NoiseSource noise) {
    require_valid(model, pen,
                  model.m1 == 0.0 ? UncertaintyMode::constant : UncertaintyMode::affine);
    if (grid_size < 2) throw Error(ErrorKind::invalid, "solver: grid_size must be >= 2");
    if (sched(sched.horizon()) != 0.0)
        throw Error(ErrorKind::invalid, "solve_scheduled: Q(T) must be 0");
    if (std::abs(sched.horizon() - model.T) > 1e-9 * model.T)
        throw Error(ErrorKind::invalid, "solve_scheduled: schedule horizon differs from model T");

    ScheduleSamples samples;
    samples.active = true;
    const size_t nq = 4 * static_cast<size_t>(grid_size);
    samples.w.resize(nq + 1);
    samples.q.resize(nq + 1);
    const double hq = model.T / static_cast<double>(nq);
    for (size_t i = 0; i <= nq; ++i) {
        const double t = std::min(model.T, static_cast<double>(i) * hq);
        samples.w[i] = weight(t);
        samples.q[i] = sched(t);
        if (samples.w[i] < 0.0)
            throw Error(ErrorKind::invalid, "solve_scheduled: negative weight sample");
    }
    return integrate_system(model, pen, grid_size, noise, samples,
                            CoeffSource::numerical_scheduled);
}

ValueCoefficients solve_for_mode(const ModelParams& model, const PenaltyParams& pen,
                                 UncertaintyMode mode, int grid_size, NoiseSource noise) {
    switch (mode) {
        case UncertaintyMode::constant:
        case UncertaintyMode::none:
            return solve_constant_closed_form(model, pen, grid_size, noise);
        case UncertaintyMode::linear: {
            // Closed form only under the explicit-solution condition.
            const double C = compute_C(model, pen);
            const double lhs = 2.0 * (pen.alpha + pen.beta1 + pen.beta2);
            if (noise == NoiseSource::m0 &&
                std::abs(lhs - C) <= 1e-10 * std::max(std::abs(C), 1.0))
                return solve_linear_closed_form(model, pen, grid_size);
            return solve_affine_numerical(model, pen, grid_size, noise);
        }
        case UncertaintyMode::affine:
            return solve_affine_numerical(model, pen, grid_size, noise);
        case UncertaintyMode::infinite_limit:
            return solve_infinite_limit_closed_form(model, pen, grid_size);
    }
    throw Error(ErrorKind::invalid, "solve_for_mode: unknown mode");
}

double hjb_residual(const ValueCoefficients& coeffs, const ModelParams& model,
                    const PenaltyParams& pen, double t, double x) {
    const OdeContext ctx(model, pen, coeffs.noise_source());
    const double a = coeffs.a(t), b = coeffs.b(t);
    const double da = coeffs.da(t), db = coeffs.db(t), dc = coeffs.dc(t);

    if (coeffs.source() == CoeffSource::closed_form_infinite) {
        // Limiting PDE: V_t + mu x - (V_x + eta0)^2 / (4(eta1+beta1)) sign ...
        const double f = 2.0 * a * x + b + model.eta0;
        return da * x * x + db * x + dc + model.mu * x + ctx.pen_const +
               f * f / (4.0 * ctx.e1b1);
    }

    const double d = ctx.C - ctx.psi(a);
    const double f = 2.0 * a * x + b + model.eta0;
    const double n = ctx.N(a);
    double r = da * x * x + db * x + dc + model.mu * x +
               0.5 * ctx.m0 * ctx.m0 * (2.0 * a + ctx.gamma) + ctx.rho_sigma_m0 + ctx.pen_const +
               ((2.0 * ctx.sum_ab - ctx.psi(a)) * f * f + 2.0 * ctx.E * f * n +
                2.0 * ctx.e1b1 * n * n) /
                   (4.0 * ctx.e1b1 * d);
    if (coeffs.scheduled()) {
        const double dev = x - coeffs.target_at(t);
        r += -coeffs.weight_at(t) * dev * dev;
    }
    return r;
}

}  // namespace optexec

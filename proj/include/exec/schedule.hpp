#pragma once

#include <string>
#include <vector>

namespace optexec {

enum class ScheduleKind { linear_twap, quadratic, tabulated };

const char* to_string(ScheduleKind kind);

// Target holdings schedule Q(t) on [0, T]: non-negative, non-increasing,
// continuous, with Q(0) = x0 and Q(T) = 0 (full liquidation). Tabulated
// schedules interpolate linearly between samples; the closed forms are
//   linear     Q(t) = x0 (1 - t/T)
//   quadratic  Q(t) = x0 (1 - (t/T)^2)
class ScheduleSpec {
public:
    static ScheduleSpec linear(double x0, double T);
    static ScheduleSpec quadratic(double x0, double T);
    // Validates the samples (monotone t, Q(0)=x0 when x0 given as samples.front(),
    // Q(T)=0, non-negative, non-increasing); error messages carry the offending
    // row index.
    static ScheduleSpec tabulated(std::vector<double> t, std::vector<double> Q);
    // Two-column CSV "t,Q" with a header line.
    static ScheduleSpec from_csv(const std::string& path);

    double operator()(double t) const;

    ScheduleKind kind() const { return kind_; }
    double x0() const { return x0_; }
    double horizon() const { return T_; }
    const std::vector<double>& sample_t() const { return t_; }
    const std::vector<double>& sample_q() const { return q_; }

private:
    ScheduleSpec() = default;

    ScheduleKind kind_ = ScheduleKind::linear_twap;
    double x0_ = 0.0, T_ = 0.0;
    std::vector<double> t_, q_;  // tabulated only
};

enum class WeightKind { constant, tabulated };

// Deviation-penalty weight w(t) >= 0, bounded and continuous on [0, T]; the
// running penalty is lambda(t, y) = -w(t) y^2 at deviation y = x_t - Q(t).
class WeightSpec {
public:
    static WeightSpec constant(double w);
    static WeightSpec tabulated(std::vector<double> t, std::vector<double> w);
    static WeightSpec from_csv(const std::string& path);

    double operator()(double t) const;

    WeightKind kind() const { return kind_; }
    double constant_value() const { return w0_; }

private:
    WeightSpec() = default;

    WeightKind kind_ = WeightKind::constant;
    double w0_ = 0.0;
    std::vector<double> t_, w_;
};

struct TrackingError {
    double max_abs = 0.0;      // max_t |x_t - Q(t)|
    double mean_square = 0.0;  // time-average of (x_t - Q(t))^2
    double terminal_gap = 0.0; // |x_T - Q(T)|
};

struct SimPath;  // simulator.hpp

struct TrackingReport {
    TrackingError overall;                 // max of max_abs, means of the rest
    std::vector<TrackingError> per_path;
};

TrackingReport tracking_error(const std::vector<SimPath>& paths, const ScheduleSpec& sched);

}  // namespace optexec

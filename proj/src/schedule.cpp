#include "exec/schedule.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "exec/error.hpp"
#include "exec/simulator.hpp"

namespace optexec {

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::linear_twap: return "linear";
        case ScheduleKind::quadratic: return "quadratic";
        case ScheduleKind::tabulated: return "tabulated";
    }
    return "?";
}

ScheduleSpec ScheduleSpec::linear(double x0, double T) {
    ScheduleSpec s;
    s.kind_ = ScheduleKind::linear_twap;
    s.x0_ = x0;
    s.T_ = T;
    return s;
}

ScheduleSpec ScheduleSpec::quadratic(double x0, double T) {
    ScheduleSpec s;
    s.kind_ = ScheduleKind::quadratic;
    s.x0_ = x0;
    s.T_ = T;
    return s;
}

ScheduleSpec ScheduleSpec::tabulated(std::vector<double> t, std::vector<double> q) {
    if (t.size() != q.size() || t.size() < 2)
        throw Error(ErrorKind::invalid, "schedule: need >= 2 (t, Q) rows of equal length");
    for (size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(q[i]))
            throw Error(ErrorKind::invalid, "schedule: non-finite entry at row " + std::to_string(i));
        if (q[i] < 0.0)
            throw Error(ErrorKind::invalid, "schedule: negative Q at row " + std::to_string(i));
        if (i > 0 && !(t[i] > t[i - 1]))
            throw Error(ErrorKind::invalid,
                        "schedule: time samples must strictly increase (row " + std::to_string(i) + ")");
        if (i > 0 && q[i] > q[i - 1])
            throw Error(ErrorKind::invalid,
                        "schedule: increasing segment at row " + std::to_string(i));
    }
    if (t.front() != 0.0)
        throw Error(ErrorKind::invalid, "schedule: first sample must be at t = 0 (row 0)");
    if (q.back() != 0.0)
        throw Error(ErrorKind::invalid,
                    "schedule: Q(T) must be 0 (row " + std::to_string(q.size() - 1) + ")");
    ScheduleSpec s;
    s.kind_ = ScheduleKind::tabulated;
    s.x0_ = q.front();
    s.T_ = t.back();
    s.t_ = std::move(t);
    s.q_ = std::move(q);
    return s;
}

namespace {

// Parses "a,b" rows after a header; returns (col1, col2) with 1-based row
// numbers in error messages.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path,
                                                                        const char* what) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, std::string(what) + ": cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::invalid, std::string(what) + ": empty file " + path);
    std::vector<double> c1, c2;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string f1, f2;
        if (!std::getline(is, f1, ',') || !std::getline(is, f2, ','))
            throw Error(ErrorKind::invalid,
                        std::string(what) + ": row " + std::to_string(row) + " needs two columns");
        try {
            c1.push_back(std::stod(f1));
            c2.push_back(std::stod(f2));
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid,
                        std::string(what) + ": row " + std::to_string(row) + " is not numeric");
        }
    }
    return {std::move(c1), std::move(c2)};
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
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

ScheduleSpec ScheduleSpec::from_csv(const std::string& path) {
    auto [t, q] = read_two_column_csv(path, "schedule csv");
    return tabulated(std::move(t), std::move(q));
}

double ScheduleSpec::operator()(double t) const {
    switch (kind_) {
        case ScheduleKind::linear_twap: {
            const double u = std::clamp(t / T_, 0.0, 1.0);
            return x0_ * (1.0 - u);
        }
        case ScheduleKind::quadratic: {
            const double u = std::clamp(t / T_, 0.0, 1.0);
            return x0_ * (1.0 - u * u);
        }
        case ScheduleKind::tabulated:
            return interp(t_, q_, t);
    }
    return 0.0;
}

WeightSpec WeightSpec::constant(double w) {
    if (w < 0.0 || !std::isfinite(w))
        throw Error(ErrorKind::invalid, "weight: must be finite and >= 0");
    WeightSpec s;
    s.kind_ = WeightKind::constant;
    s.w0_ = w;
    return s;
}

WeightSpec WeightSpec::tabulated(std::vector<double> t, std::vector<double> w) {
    if (t.size() != w.size() || t.size() < 2)
        throw Error(ErrorKind::invalid, "weight: need >= 2 (t, w) rows of equal length");
    for (size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(w[i]) || w[i] < 0.0)
            throw Error(ErrorKind::invalid, "weight: negative or non-finite at row " + std::to_string(i));
        if (i > 0 && !(t[i] > t[i - 1]))
            throw Error(ErrorKind::invalid, "weight: time samples must strictly increase (row " +
                                                std::to_string(i) + ")");
    }
    WeightSpec s;
    s.kind_ = WeightKind::tabulated;
    s.t_ = std::move(t);
    s.w_ = std::move(w);
    return s;
}

WeightSpec WeightSpec::from_csv(const std::string& path) {
    auto [t, w] = read_two_column_csv(path, "weight csv");
    return tabulated(std::move(t), std::move(w));
}

double WeightSpec::operator()(double t) const {
    if (kind_ == WeightKind::constant) return w0_;
    return interp(t_, w_, t);
}

TrackingReport tracking_error(const std::vector<SimPath>& paths, const ScheduleSpec& sched) {
    TrackingReport report;
    if (paths.empty()) return report;
    double sum_ms = 0.0, sum_gap = 0.0;
    for (const auto& p : paths) {
        TrackingError e;
        double ssq = 0.0;
        for (size_t i = 0; i < p.t.size(); ++i) {
            const double d = p.x[i] - sched(p.t[i]);
            e.max_abs = std::max(e.max_abs, std::abs(d));
            ssq += d * d;
        }
        e.mean_square = p.t.empty() ? 0.0 : ssq / static_cast<double>(p.t.size());
        e.terminal_gap = std::abs(p.x_T - sched(sched.horizon()));
        report.overall.max_abs = std::max(report.overall.max_abs, e.max_abs);
        sum_ms += e.mean_square;
        sum_gap += e.terminal_gap;
        report.per_path.push_back(e);
    }
    report.overall.mean_square = sum_ms / static_cast<double>(paths.size());
    report.overall.terminal_gap = sum_gap / static_cast<double>(paths.size());
    return report;
}

}  // namespace optexec

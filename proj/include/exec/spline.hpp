#pragma once

#include <cstddef>
#include <vector>

#include "exec/error.hpp"

namespace optexec {

// Natural cubic spline on strictly increasing knots. Used to evaluate solved
// coefficient curves off-grid; the derivative is consumed only by the PDE
// residual check.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw Error(ErrorKind::invalid, "CubicSpline: need >= 2 matching knots");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw Error(ErrorKind::invalid, "CubicSpline: knots must be strictly increasing");
        m_.assign(n, 0.0);
        if (n == 2) return;  // degenerates to the chord

        // Thomas solve for the interior moments; natural end conditions m_0 = m_{n-1} = 0.
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
        for (size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            sub[i] = hl / 6.0;
            diag[i] = (hl + hr) / 3.0;
            sup[i] = hr / 6.0;
            rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
        }
        for (size_t i = 2; i + 1 < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (size_t i = n - 2; i >= 1; --i) {
            m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
            if (i == 1) break;
        }
    }

    double operator()(double x) const {
        const size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double u = x_[i + 1] - x, w = x - x_[i];
        return m_[i] * u * u * u / (6.0 * h) + m_[i + 1] * w * w * w / (6.0 * h) +
               (y_[i] / h - m_[i] * h / 6.0) * u + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * w;
    }

    double derivative(double x) const {
        const size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double u = x_[i + 1] - x, w = x - x_[i];
        return -m_[i] * u * u / (2.0 * h) + m_[i + 1] * w * w / (2.0 * h) +
               (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6.0;
    }

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    // End segments extrapolate with the boundary cubic.
    size_t segment(double x) const {
        const size_t n = x_.size();
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return n - 2;
        size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace optexec

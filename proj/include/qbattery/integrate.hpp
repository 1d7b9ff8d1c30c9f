#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qbattery/types.hpp"

namespace qbattery {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_max = 0.0;  // 0 = unlimited
    long max_steps = 50000000;
};

struct OdeStats {
    long n_accepted = 0;
    long n_rejected = 0;

    OdeStats& operator+=(const OdeStats& o) {
        n_accepted += o.n_accepted;
        n_rejected += o.n_rejected;
        return *this;
    }
};

namespace detail {

inline double error_norm(const ComplexMatrix& err, const ComplexMatrix& y0,
                         const ComplexMatrix& y1, double atol, double rtol) {
    double acc = 0.0;
    const auto n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double scale =
            atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        const double e = std::abs(err.data()[i]) / scale;
        acc += e * e;
    }
    return std::sqrt(acc / double(n));
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) on a matrix-valued state. `rhs(y, out)`
/// writes the derivative into `out`. Advances y from t0 to t1 in place.
template <class Rhs>
OdeStats rk45_advance(const Rhs& rhs, ComplexMatrix& y, double t0, double t1,
                      const OdeOptions& opt = {}) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // 5th-order minus embedded 4th-order weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    if (t1 <= t0) return stats;

    const auto rows = y.rows(), cols = y.cols();
    ComplexMatrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols),
        k5(rows, cols), k6(rows, cols), k7(rows, cols), ytmp(rows, cols), ynew(rows, cols),
        err(rows, cols);

    rhs(y, k1);
    double span = t1 - t0;
    double h = span;
    // Conservative first step from the initial derivative scale.
    const double d0 = y.norm(), d1 = k1.norm();
    if (d1 > 1e-30) h = std::min(h, 0.01 * std::max(d0, 1.0) / d1);
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

    double t = t0;
    // The generator is autonomous, so k1 stays valid across rejected steps
    // and FSAL reuse hands k7 to the next step after acceptance.
    while (t < t1) {
        if (stats.n_accepted + stats.n_rejected > opt.max_steps)
            throw std::runtime_error("rk45_advance: max step count exceeded");
        h = std::min(h, t1 - t);

        ytmp = y + h * (a21 * k1);
        rhs(ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(ynew, k7);  // FSAL
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double norm = detail::error_norm(err, y, ynew, opt.atol, opt.rtol);
        if (norm <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            ++stats.n_accepted;
        } else {
            ++stats.n_rejected;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(norm, 1e-12), -0.2), 0.2, 5.0);
        h *= factor;
        if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
        if (!(h > 0.0) || t + h == t)
            throw std::runtime_error("rk45_advance: step size underflow");
    }
    return stats;
}

}  // namespace qbattery

#pragma once

// Dormand-Prince 5(4) with a PI step-size controller.  State is any Eigen
// fixed-size matrix; the error norm is the max over entries.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace fbzs {

class step_size_underflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
    double atol = 1e-11;
    double rtol = 1e-11;
    double h0 = 0;             // 0: pick from tolerance and interval
    long max_steps = 2'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
};

template <class State, class Rhs>
State integrate_dopri5(Rhs&& f, double x0, double x1, State y, const IntegratorOptions& opt,
                       IntegratorStats* stats = nullptr) {
    if (x0 == x1) return y;
    // Butcher tableau of Dormand and Prince (1980).
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    double h = opt.h0 > 0 ? opt.h0 : std::min(span, 0.05 * std::pow(opt.rtol, 0.2) * 10);
    double x = x0;
    double err_prev = 1e-4;
    State k1 = f(x, y), k2, k3, k4, k5, k6, k7, ytmp, ynew;
    long steps = 0;
    bool last_rejected = false;

    while (dir * (x1 - x) > 0) {
        if (++steps > opt.max_steps) throw step_size_underflow("integrator exceeded maximum step count");
        const double remaining = std::abs(x1 - x);
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(x)))
            throw step_size_underflow("integrator step size underflow");
        const double hs = dir * h;

        ytmp = y + hs * (a21 * k1);
        k2 = f(x + c2 * hs, ytmp);
        ytmp = y + hs * (a31 * k1 + a32 * k2);
        k3 = f(x + c3 * hs, ytmp);
        ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
        k4 = f(x + c4 * hs, ytmp);
        ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        k5 = f(x + c5 * hs, ytmp);
        ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        const double xn = final_step ? x1 : x + hs;
        k6 = f(xn, ytmp);
        ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(xn, ynew);

        State errv = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0;
        for (Eigen::Index i = 0; i < errv.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            err = std::max(err, std::abs(errv(i)) / sc);
        }

        if (err <= 1.0) {
            // PI control (Gustafsson), exponents as in Hairer-Wanner DOPRI5.
            double fac = err == 0 ? 5.0
                                  : 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            err_prev = std::max(err, 1e-4);
            x = xn;
            y = ynew;
            k1 = k7;
            h *= fac;
            last_rejected = false;
            if (stats) ++stats->accepted;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
            if (stats) ++stats->rejected;
        }
    }
    return y;
}

} // namespace fbzs

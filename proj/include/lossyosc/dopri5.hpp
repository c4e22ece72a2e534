#pragma once

// Explicit embedded Runge-Kutta 5(4) of Dormand and Prince with the
// fourth-order continuous extension and PI step-size control of Hairer &
// Wanner's DOPRI5. The state is a complex Eigen vector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lossyosc/errors.hpp"

namespace lossyosc {

struct IntegratorConfig {
    double rtol = 1e-9;
    double atol = 1e-12;
    long max_steps = 1'000'000;
    double initial_step = 0.0;  ///< 0 selects the starting step automatically

    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0)) {
            throw InvalidArgument("integrator tolerances must be positive");
        }
        if (max_steps <= 0) throw InvalidArgument("max_steps must be positive");
        if (initial_step < 0.0) throw InvalidArgument("initial_step must be nonnegative");
    }
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

/// Continuous extension over one accepted step [t0, t0 + h].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    Eigen::VectorXcd r1, r2, r3, r4, r5;

    double t1() const { return t0 + h; }

    Eigen::VectorXcd value(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }

    Eigen::VectorXcd derivative(double t) const {
        const double th = (t - t0) / h;
        return (r2 + (1.0 - 2.0 * th) * r3 + th * (2.0 - 3.0 * th) * r4 +
                2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * r5) /
               h;
    }
};

/// All accepted steps of one integration, queryable anywhere in range.
class DenseSolution {
public:
    void push(DenseStep step) { steps_.push_back(std::move(step)); }

    bool empty() const noexcept { return steps_.empty(); }
    double t_begin() const { return steps_.front().t0; }
    double t_end() const { return steps_.back().t1(); }
    const std::vector<DenseStep>& steps() const noexcept { return steps_; }

    const DenseStep& step_at(double t) const {
        if (steps_.empty()) throw InvalidArgument("dense solution is empty");
        if (t < t_begin() || t > t_end()) {
            throw InvalidArgument("time " + std::to_string(t) + " outside the integrated range");
        }
        auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                                   [](double x, const DenseStep& s) { return x < s.t0; });
        if (it != steps_.begin()) --it;
        return *it;
    }

    Eigen::VectorXcd value(double t) const { return step_at(t).value(t); }
    Eigen::VectorXcd derivative(double t) const { return step_at(t).derivative(t); }

private:
    std::vector<DenseStep> steps_;
};

namespace detail {

inline double scaled_rms(const Eigen::VectorXcd& v, const Eigen::VectorXd& scale) {
    if (v.size() == 0) return 0.0;
    return std::sqrt((v.cwiseAbs().cwiseQuotient(scale)).squaredNorm() /
                     static_cast<double>(v.size()));
}

template <class Rhs>
double initial_step(Rhs& f, double t, const Eigen::VectorXcd& y, const Eigen::VectorXcd& f0,
                    double hmax, const IntegratorConfig& cfg, StepStats& stats) {
    const Eigen::VectorXd sk =
        (cfg.atol + cfg.rtol * y.cwiseAbs().array()).matrix();
    const double dnf = scaled_rms(f0, sk);
    const double dny = scaled_rms(y, sk);
    double h = (dnf <= 1e-5 || dny <= 1e-5) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, hmax);
    const Eigen::VectorXcd y1 = y + h * f0;
    const Eigen::VectorXcd f1 = f(t + h, y1);
    ++stats.rhs_evaluations;
    const double der2 = scaled_rms(f1 - f0, sk) / h;
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, hmax});
}

}  // namespace detail

/// Integrates dy/dt = f(t, y) from t0 to t_end, restarting the method at
/// every breakpoint in (t0, t_end) so that kinks of piecewise-linear
/// coefficients fall on step boundaries. `on_step(const DenseStep&)` is
/// called for every accepted step, in order.
template <class Rhs, class Observer>
StepStats integrate_dopri5(Rhs&& f, double t0, Eigen::VectorXcd y, double t_end,
                           const std::vector<double>& breakpoints, const IntegratorConfig& cfg,
                           Observer&& on_step) {
    cfg.validate();
    StepStats stats;
    if (!(t_end > t0)) return stats;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    static constexpr double safe = 0.9, beta = 0.04;
    static constexpr double expo1 = 0.2 - beta * 0.75;
    static constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    const double uround = std::numeric_limits<double>::epsilon();

    std::vector<double> stops;
    for (double b : breakpoints) {
        if (b > t0 && b < t_end) stops.push_back(b);
    }
    std::sort(stops.begin(), stops.end());
    stops.push_back(t_end);

    double t = t0;
    double h = cfg.initial_step;
    long steps = 0;

    for (double seg_end : stops) {
        const double hmax = seg_end - t;
        Eigen::VectorXcd k1 = f(t, y);
        ++stats.rhs_evaluations;
        if (h <= 0.0) {
            h = detail::initial_step(f, t, y, k1, hmax, cfg, stats);
        }
        h = std::min(h, hmax);
        double facold = 1e-4;
        bool reject = false;

        while (true) {
            if (steps >= cfg.max_steps) {
                throw IntegrationFailure("integrator exceeded " + std::to_string(cfg.max_steps) +
                                             " steps at t = " + std::to_string(t),
                                         t);
            }
            if (0.1 * std::abs(h) <= std::abs(t) * uround) {
                throw IntegrationFailure("step size underflow at t = " + std::to_string(t), t);
            }
            bool last = false;
            if (t + 1.01 * h >= seg_end) {
                h = seg_end - t;
                last = true;
            }
            ++steps;

            const Eigen::VectorXcd k2 = f(t + c2 * h, y + h * (a21 * k1));
            const Eigen::VectorXcd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            const Eigen::VectorXcd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Eigen::VectorXcd k5 =
                f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Eigen::VectorXcd k6 =
                f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Eigen::VectorXcd y1 =
                y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const Eigen::VectorXcd k7 = f(t + h, y1);
            stats.rhs_evaluations += 6;

            const Eigen::VectorXcd errv =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const Eigen::VectorXd sk =
                (cfg.atol + cfg.rtol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
            const double err = detail::scaled_rms(errv, sk);
            if (!std::isfinite(err) || !y1.allFinite()) {
                throw NumericalFailure("integrator produced NaN/Inf at t = " + std::to_string(t));
            }

            const double fac11 = std::pow(err, expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = h / fac;

            if (err <= 1.0) {
                facold = std::max(err, 1e-4);
                ++stats.accepted;
                DenseStep step;
                step.t0 = t;
                step.h = h;
                const Eigen::VectorXcd ydiff = y1 - y;
                const Eigen::VectorXcd bspl = h * k1 - ydiff;
                step.r1 = y;
                step.r2 = ydiff;
                step.r3 = bspl;
                step.r4 = ydiff - h * k7 - bspl;
                step.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                on_step(static_cast<const DenseStep&>(step));

                k1 = k7;
                y = y1;
                t = last ? seg_end : t + h;
                if (std::abs(hnew) > hmax) hnew = hmax;
                if (reject) hnew = std::min(std::abs(hnew), std::abs(h));
                reject = false;
                if (last) {
                    // carry the proposal into the next segment
                    h = hnew;
                    break;
                }
                h = hnew;
            } else {
                hnew = h / std::min(facc1, fac11 / safe);
                reject = true;
                if (stats.accepted >= 1) ++stats.rejected;
                h = hnew;
            }
        }
    }
    return stats;
}

}  // namespace lossyosc

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "centerkit/errors.hpp"

namespace centerkit {

/* Embedded Dormand-Prince 5(4) pair with the standard quartic dense
   output.  State dimension is fixed at two (planar fields and their polar
   lifts); time signs are handled by signed steps. */

using OdeState = std::array<double, 2>;
using OdeRhs = std::function<OdeState(const OdeState&)>;

struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    OdeState y0{}, dy{}, r3{}, r4{}, r5{};

    /* Value of the interpolant at t0 + theta*h, theta in [0,1]. */
    OdeState eval(double theta) const {
        const double th1 = 1.0 - theta;
        OdeState y;
        for (int i = 0; i < 2; ++i)
            y[i] = y0[i] + theta * (dy[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
        return y;
    }

    double t_end() const { return t0 + h; }
};

enum class StepAction { proceed, stop };

struct OdeControl {
    StepAction action = StepAction::proceed;
    /* When set, the step is discarded and retried with this size. */
    double retry_h = 0.0;
    bool retry = false;

    static OdeControl proceed() { return {}; }
    static OdeControl stop() { return {StepAction::stop, 0.0, false}; }
    static OdeControl retry_with(double h) { return {StepAction::proceed, h, true}; }
};

using StepCallback = std::function<OdeControl(const DenseSegment&)>;

struct OdeLimits {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 10.0;
    double max_time = 1e4;  // |t| budget; exceeding it raises NoReturn
};

namespace detail {

inline constexpr double dp_c2 = 1.0 / 5.0, dp_c3 = 3.0 / 10.0, dp_c4 = 4.0 / 5.0,
                        dp_c5 = 8.0 / 9.0;
inline constexpr double dp_a21 = 1.0 / 5.0;
inline constexpr double dp_a31 = 3.0 / 40.0, dp_a32 = 9.0 / 40.0;
inline constexpr double dp_a41 = 44.0 / 45.0, dp_a42 = -56.0 / 15.0, dp_a43 = 32.0 / 9.0;
inline constexpr double dp_a51 = 19372.0 / 6561.0, dp_a52 = -25360.0 / 2187.0,
                        dp_a53 = 64448.0 / 6561.0, dp_a54 = -212.0 / 729.0;
inline constexpr double dp_a61 = 9017.0 / 3168.0, dp_a62 = -355.0 / 33.0,
                        dp_a63 = 46732.0 / 5247.0, dp_a64 = 49.0 / 176.0,
                        dp_a65 = -5103.0 / 18656.0;
inline constexpr double dp_b1 = 35.0 / 384.0, dp_b3 = 500.0 / 1113.0, dp_b4 = 125.0 / 192.0,
                        dp_b5 = -2187.0 / 6784.0, dp_b6 = 11.0 / 84.0;
inline constexpr double dp_e1 = 71.0 / 57600.0, dp_e3 = -71.0 / 16695.0, dp_e4 = 71.0 / 1920.0,
                        dp_e5 = -17253.0 / 339200.0, dp_e6 = 22.0 / 525.0, dp_e7 = -1.0 / 40.0;
inline constexpr double dp_d1 = -12715105075.0 / 11282082432.0,
                        dp_d3 = 87487479700.0 / 32700410799.0,
                        dp_d4 = -10690763975.0 / 1880347072.0,
                        dp_d5 = 701980252875.0 / 199316789632.0,
                        dp_d6 = -1453857185.0 / 822651844.0,
                        dp_d7 = 69997945.0 / 29380423.0;

}  // namespace detail

class Dp5Integrator {
public:
    Dp5Integrator(OdeRhs rhs, const OdeLimits& limits) : f_(std::move(rhs)), lim_(limits) {}

    /* Integrates from (t0, y0) toward t0 + dir*infinity until the
       callback stops it or |t - t0| exceeds max_time (NoReturn).  The
       callback sees every accepted step with its dense interpolant. */
    void run(double t0, OdeState y0, double dir, const StepCallback& cb) {
        double t = t0;
        OdeState y = y0;
        OdeState k1 = f_(y);
        double h = dir * initial_step(y, k1);
        for (;;) {
            if (std::abs(t - t0) > lim_.max_time)
                throw NoReturn("time budget exhausted before return");
            double hmax = lim_.max_step;
            if (std::abs(h) > hmax) h = dir * hmax;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw StepFailure("step size underflow");

            OdeState y1, k7;
            double err = try_step(t, y, k1, h, y1, k7);
            if (err > 1.0) {
                double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
                h *= fac;
                continue;
            }

            DenseSegment seg = make_dense(t, y, h, y1);
            OdeControl ctl = cb(seg);
            if (ctl.retry) {
                h = dir * std::min(std::abs(ctl.retry_h), hmax);
                continue;
            }
            t += h;
            y = y1;
            k1 = k7;  // first-same-as-last
            if (ctl.action == StepAction::stop) return;

            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, fac));
        }
    }

    /* Integrates exactly to t_target and returns the final state. */
    OdeState run_to(double t0, OdeState y0, double t_target) {
        if (std::abs(t_target - t0) < 1e-14 * std::max(1.0, std::abs(t0))) return y0;
        const double dir = t_target > t0 ? 1.0 : -1.0;
        double t = t0;
        OdeState y = y0;
        OdeState k1 = f_(y);
        double h = dir * initial_step(y, k1);
        for (;;) {
            if (std::abs(h) > lim_.max_step) h = dir * lim_.max_step;
            bool last = false;
            if ((t + h - t_target) * dir >= 0.0) {
                h = t_target - t;
                last = true;
            }
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw StepFailure("step size underflow");
            OdeState y1, k7;
            double err = try_step(t, y, k1, h, y1, k7);
            if (err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                continue;
            }
            t += h;
            y = y1;
            k1 = k7;
            if (last) return y;
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, fac));
        }
    }

private:
    OdeRhs f_;
    OdeLimits lim_;
    std::array<OdeState, 7> k_{};

    double initial_step(const OdeState& y, const OdeState& k1) const {
        double dn = std::hypot(k1[0], k1[1]);
        double yn = std::hypot(y[0], y[1]);
        double h = 0.01 * (yn + 1e-3) / (dn + 1e-8);
        return std::min(h, lim_.max_step);
    }

    /* One trial step; returns the scaled error norm and fills y1, k7. */
    double try_step(double t, const OdeState& y, const OdeState& k1, double h, OdeState& y1,
                    OdeState& k7) {
        using namespace detail;
        (void)t;
        auto& k = k_;
        k[0] = k1;
        OdeState w;
        for (int i = 0; i < 2; ++i) w[i] = y[i] + h * dp_a21 * k[0][i];
        k[1] = f_(w);
        for (int i = 0; i < 2; ++i) w[i] = y[i] + h * (dp_a31 * k[0][i] + dp_a32 * k[1][i]);
        k[2] = f_(w);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + h * (dp_a41 * k[0][i] + dp_a42 * k[1][i] + dp_a43 * k[2][i]);
        k[3] = f_(w);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + h * (dp_a51 * k[0][i] + dp_a52 * k[1][i] + dp_a53 * k[2][i] +
                               dp_a54 * k[3][i]);
        k[4] = f_(w);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + h * (dp_a61 * k[0][i] + dp_a62 * k[1][i] + dp_a63 * k[2][i] +
                               dp_a64 * k[3][i] + dp_a65 * k[4][i]);
        k[5] = f_(w);
        for (int i = 0; i < 2; ++i)
            y1[i] = y[i] + h * (dp_b1 * k[0][i] + dp_b3 * k[2][i] + dp_b4 * k[3][i] +
                                dp_b5 * k[4][i] + dp_b6 * k[5][i]);
        k[6] = f_(y1);
        k7 = k[6];

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (dp_e1 * k[0][i] + dp_e3 * k[2][i] + dp_e4 * k[3][i] +
                            dp_e5 * k[4][i] + dp_e6 * k[5][i] + dp_e7 * k[6][i]);
            double sc = lim_.abs_tol + lim_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (e / sc) * (e / sc);
        }
        return std::sqrt(err / 2.0);
    }

    DenseSegment make_dense(double t, const OdeState& y, double h, const OdeState& y1) const {
        using namespace detail;
        const auto& k = k_;
        DenseSegment s;
        s.t0 = t;
        s.h = h;
        s.y0 = y;
        for (int i = 0; i < 2; ++i) {
            double dy = y1[i] - y[i];
            double bspl = h * k[0][i] - dy;
            s.dy[i] = dy;
            s.r3[i] = bspl;
            s.r4[i] = dy - h * k[6][i] - bspl;
            s.r5[i] = h * (dp_d1 * k[0][i] + dp_d3 * k[2][i] + dp_d4 * k[3][i] +
                           dp_d5 * k[4][i] + dp_d6 * k[5][i] + dp_d7 * k[6][i]);
        }
        return s;
    }
};

}  // namespace centerkit

#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "centerkit/errors.hpp"

namespace centerkit {

/* Adaptive Gauss-Kronrod 7-15 quadrature with interval bisection.
   Absolute-error driven; intervals split until their Kronrod error
   estimates sum below the requested tolerance. */

namespace detail {

inline constexpr std::array<double, 8> gk_nodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};

inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};

inline constexpr std::array<double, 4> gk_wg = {0.129484966168870, 0.279705391489277,
                                               0.381830050505119, 0.417959183673469};

}  // namespace detail

struct GkEstimate {
    double value = 0.0;
    double error = 0.0;
};

inline GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    using namespace detail;
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);

    const double fc = f(c);
    double resk = gk_wk[7] * fc;
    double resg = gk_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = hl * gk_nodes[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += gk_wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += gk_wg[j / 2] * (f1 + f2);
    }
    GkEstimate r;
    r.value = resk * hl;
    r.error = std::abs((resk - resg) * hl);
    return r;
}

/* Integrates f over [a,b] to absolute tolerance abs_tol.  The integrand
   must be finite on the whole interval; a non-finite sample raises
   SingularIntegrand. */
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    auto guarded = [&f](double x) {
        double v = f(x);
        if (!std::isfinite(v)) throw SingularIntegrand("integrand not finite");
        return v;
    };

    struct Interval {
        double a, b;
        GkEstimate est;
    };
    std::function<double(const Interval&, double, int)> refine =
        [&](const Interval& iv, double tol, int depth) -> double {
        if (iv.est.error <= tol || depth >= 48) return iv.est.value;
        const double m = 0.5 * (iv.a + iv.b);
        Interval left{iv.a, m, gk15(guarded, iv.a, m)};
        Interval right{m, iv.b, gk15(guarded, m, iv.b)};
        return refine(left, 0.5 * tol, depth + 1) + refine(right, 0.5 * tol, depth + 1);
    };
    Interval whole{a, b, gk15(guarded, a, b)};
    return refine(whole, abs_tol, 0);
}

}  // namespace centerkit

#pragma once

#include <string>
#include <vector>

#include "centerkit/fields.hpp"
#include "centerkit/polar.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 10.0;
    double max_time = 1e4;
    double disk_tol = 1e-6;  // escape threshold: |z| > 1 + disk_tol
};

enum class PeriodVerdict { ptc, divergent, inconclusive };

std::string to_string(PeriodVerdict v);

struct PeriodSample {
    double radius = 0.0;
    double theta = 0.0;  // NaN when not converged
    bool converged = false;
};

struct PeriodProfile {
    double ray_angle = 0.0;
    std::vector<PeriodSample> samples;
    PeriodVerdict verdict = PeriodVerdict::inconclusive;
    double limit = 0.0;  // NaN unless verdict == ptc

    std::string to_csv() const;
    std::string to_json() const;
};

/* Time-t map of the field. */
Vec2 flow(const PlanarField& f, Vec2 z, double t, const IntegratorConfig& cfg = {});

/* Time-t map of a field already in polar coordinates. */
PolarPoint polar_flow(const PolarField& pf, PolarPoint w, double t,
                      const IntegratorConfig& cfg = {});

/* Signed time for the orbit through `from` to reach the angle
   target_phi in the polar lift, refined to |phi(t) - target| <= 1e-10. */
double time_to_angle(const PolarField& pf, PolarPoint from, double target_phi,
                     const IntegratorConfig& cfg = {});

/* First-return time to the ray through z: the orbit is followed in the
   polar lift until the angle has advanced by 2 pi, and the return is
   required to close up in radius within 1e-6. */
double period(const PlanarField& f, Vec2 z, const IntegratorConfig& cfg = {});

/* Periods sampled along a ray, with a convergence verdict for r -> 0.
   Radii must be positive, decreasing, and at most 1. */
PeriodProfile period_profile(const PlanarField& f, double ray_angle,
                             const std::vector<double>& radii,
                             const IntegratorConfig& cfg = {});

/* z -> flow(z, alpha(z)). */
Vec2 shift_apply(const PlanarField& f, const ScalarField& alpha, Vec2 z,
                 const IntegratorConfig& cfg = {});

/* max over samples of |flow(z, n * mu(z)) - z|; zero when mu is a period
   function and n an integer. */
double kernel_residual(const PlanarField& f, const ScalarField& mu, int n,
                       const std::vector<Vec2>& samples, const IntegratorConfig& cfg = {});

}  // namespace centerkit

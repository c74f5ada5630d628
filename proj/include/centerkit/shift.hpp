#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "centerkit/fields.hpp"
#include "centerkit/flow.hpp"
#include "centerkit/polar.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

/* Factorization h(z) = z * gamma(z) through complex multiplication, for
   origin-preserving h with 1-jet tau * Id, tau > 0.  angle is a
   continuous argument of gamma chosen so angle(O) = 0. */
struct GammaDecomposition {
    double tau = 1.0;
    std::function<double(Vec2)> magnitude;
    std::function<double(Vec2)> angle;
};

GammaDecomposition gamma_decompose(std::function<Vec2(Vec2)> h, double tau);

/* Estimated 1-jet of a map at the origin. */
SquareMatrix map_jet(const std::function<Vec2(Vec2)>& h);

/* Matches the 1-jet of h against the time-omega maps of the linear part
   of f and returns (omega, h1) with h1 = flow(-omega) after h, so h1 has
   identity 1-jet.  Orientation-reversing families are rejected. */
struct OmegaSplit {
    double omega = 0.0;
    std::function<Vec2(Vec2)> h1;
};

OmegaSplit omega_extract(const std::function<Vec2(Vec2)>& h, const PlanarField& f);

/* Integral of 1 / (1 + phibar) over [phi0, phi0 + 2 pi] for a field in
   normalized polar form (1 + phibar) d_phi + rbar d_rho. */
double period_integral(const std::function<double(double, double)>& phibar, double rho,
                       double phi0 = 0.0);

/* Time of flight to the lifted image, for normalized polar form:
   sigma = integral over [phi, Phi(phi, rho)] of 1 / (1 + phibar). */
double sigma_from_lift(const std::function<double(double, double)>& phibar,
                       const LiftedMap& lifted, double phi, double rho);

struct ShiftGrid {
    std::vector<Vec2> points;
    std::vector<double> sigma;
    std::vector<double> residuals;  // |flow(z, sigma(z)) - h(z)| per point
    double max_residual = 0.0;
};

/* Recovers the time function of a shift map over a PTC field:
   h(z) = flow(z, sigma(z)) with the branch sigma(O) = omega. */
ShiftGrid recover_shift(const PlanarField& f, const std::function<Vec2(Vec2)>& h,
                        const std::vector<Vec2>& samples, const IntegratorConfig& cfg = {});

/* Whether alpha stays clear of the criticality threshold:
   directional derivative of alpha along f bounded above -1 by margin. */
bool gamma_set_membership(const PlanarField& f, const ScalarField& alpha,
                          const std::vector<Vec2>& samples, double margin = 1e-9);

}  // namespace centerkit

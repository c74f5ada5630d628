#pragma once

#include <functional>
#include <vector>

#include "centerkit/fields.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

/* Coordinates on the half-plane H = {(phi, rho) : rho >= 0}, covering
   the punctured disk through P(phi, rho) = (rho cos phi, rho sin phi). */
struct PolarPoint {
    double phi = 0.0;
    double rho = 0.0;
};

struct PolarField {
    std::function<double(double, double)> phi_component;  // angular rate
    std::function<double(double, double)> rho_component;  // radial rate
    bool period_2pi = true;  // invariant under phi -> phi + 2 pi
};

struct LiftedMap {
    std::function<double(double, double)> phi_map;
    std::function<double(double, double)> rho_map;
    bool equivariant = true;
};

Vec2 polar_point(double phi, double rho);

/* Inverse of P away from the origin; the angle representative nearest
   branch_hint is returned. */
PolarPoint unpolar(Vec2 z, double branch_hint = 0.0);

/* The field in polar coordinates:
   B_phi = (-sin(phi) F1 + cos(phi) F2) / rho,  B_rho = cos(phi) F1 + sin(phi) F2,
   with rho = 0 values supplied in closed form for cataloged constructors
   and by a small-rho limit otherwise. */
PolarField lift_field(const PlanarField& f);

/* The unique equivariant lift of an origin-preserving map with scalar
   1-jet, fixing the boundary rho = 0. */
LiftedMap lift_map(std::function<Vec2(Vec2)> h);

/* Single-chart lift formulas valid for |phi - phi0| < pi/2; retained as
   a cross-check against the global construction. */
PolarPoint chart_lift_point(const std::function<Vec2(Vec2)>& h, double phi0, double phi,
                            double rho);

/* Function on the disk induced by a Z-invariant function on H, zero at
   the origin.  With check_flatness set, the boundary flatness of the
   input is verified for orders 1..4 first. */
ScalarField descend_flat(std::function<double(double, double)> a_lifted,
                         bool check_flatness = false);

/* For each requested order k: whether sup_{|z|=r} |g| <= C r^k holds on
   all given radii, with C fitted at the largest one. */
std::vector<bool> flatness_order(const ScalarField& g, const std::vector<int>& orders,
                                 const std::vector<double>& radii);

/* Diagnostics on the standard probe grid. */
double z_invariance_defect(const PolarField& pf);
double axis_tangency_defect(const PolarField& pf);

/* The standard probe grid: phi = 2 pi j / 32, rho = 0.5 * 2^{-i}, i = 0..7. */
std::vector<double> probe_angles();
std::vector<double> probe_radii();

}  // namespace centerkit

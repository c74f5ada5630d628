#include "centerkit/polar.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "centerkit/errors.hpp"
#include "centerkit/shift.hpp"

namespace centerkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double quadratic_form_value(const SquareMatrix& m, double x, double y) {
    return m(0, 0) * x * x + 2.0 * m(0, 1) * x * y + m(1, 1) * y * y;
}

struct AxisValue {
    double phi_rate = 0.0;
    double rho_rate = 0.0;
};

/* rho = 0 value of the lifted field, in closed form per constructor. */
struct AxisVisitor {
    double phi;

    AxisValue operator()(const RotationSpec& s) const { return {s.b, 0.0}; }

    AxisValue operator()(const MonomialSpec& s) const {
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        double v = 0.0;
        if (s.q == 1) v += s.b * sn * sn;
        if (s.p == 1) v += s.b * c * c;
        return {v, 0.0};
    }

    AxisValue operator()(const QuadraticProductSpec& s) const {
        if (s.forms.size() == 1)
            return {2.0 * quadratic_form_value(s.forms[0], std::cos(phi), std::sin(phi)), 0.0};
        return {0.0, 0.0};
    }

    AxisValue operator()(const TakensFlatSpec& s) const { return {s.beta[0], 0.0}; }

    AxisValue operator()(const TakensNonflatSpec&) const { return {kTwoPi, 0.0}; }

    AxisValue operator()(const PolynomialSpec&) const { return {0.0, 0.0}; }
};

}  // namespace

Vec2 polar_point(double phi, double rho) {
    return {rho * std::cos(phi), rho * std::sin(phi)};
}

PolarPoint unpolar(Vec2 z, double branch_hint) {
    const double rho = norm(z);
    if (rho == 0.0) throw OriginHasNoAngle("the origin has no polar angle");
    const double base = std::atan2(z.y, z.x);
    const double phi = base + kTwoPi * std::round((branch_hint - base) / kTwoPi);
    return {phi, rho};
}

PolarField lift_field(const PlanarField& f) {
    const auto eval = f.eval;
    const auto meta = f.meta;

    auto axis_value = [meta, eval](double phi) -> AxisValue {
        if (meta && !std::holds_alternative<PolynomialSpec>(*meta))
            return std::visit(AxisVisitor{phi}, *meta);
        const double rho = 1e-8;
        const Vec2 v = eval(polar_point(phi, rho));
        return {(-std::sin(phi) * v.x + std::cos(phi) * v.y) / rho,
                std::cos(phi) * v.x + std::sin(phi) * v.y};
    };

    PolarField pf;
    pf.phi_component = [eval, axis_value](double phi, double rho) {
        if (rho == 0.0) return axis_value(phi).phi_rate;
        const Vec2 v = eval(polar_point(phi, rho));
        return (-std::sin(phi) * v.x + std::cos(phi) * v.y) / rho;
    };
    pf.rho_component = [eval, axis_value](double phi, double rho) {
        if (rho == 0.0) return axis_value(phi).rho_rate;
        const Vec2 v = eval(polar_point(phi, rho));
        return std::cos(phi) * v.x + std::sin(phi) * v.y;
    };
    pf.period_2pi = true;
    return pf;
}

LiftedMap lift_map(std::function<Vec2(Vec2)> h) {
    const Vec2 at_origin = h({0.0, 0.0});
    if (norm(at_origin) > 1e-10)
        throw NotOriginPreserving("map does not fix the origin");

    const SquareMatrix jet = map_jet(h);
    const double tau = 0.5 * (jet(0, 0) + jet(1, 1));
    const double jet_tol = 1e-6 * std::max(1.0, std::abs(tau));
    if (tau <= 0.0 || std::abs(jet(0, 1)) > jet_tol || std::abs(jet(1, 0)) > jet_tol ||
        std::abs(jet(0, 0) - jet(1, 1)) > jet_tol)
        throw JetNotScalar("1-jet at the origin is not a positive scalar");

    const GammaDecomposition gamma = gamma_decompose(h, tau);

    LiftedMap lm;
    lm.phi_map = [angle = gamma.angle](double phi, double rho) {
        if (rho == 0.0) return phi;
        return phi + angle(polar_point(phi, rho));
    };
    lm.rho_map = [h](double phi, double rho) {
        if (rho == 0.0) return 0.0;
        return norm(h(polar_point(phi, rho)));
    };
    lm.equivariant = true;
    return lm;
}

PolarPoint chart_lift_point(const std::function<Vec2(Vec2)>& h, double phi0, double phi,
                            double rho) {
    if (rho == 0.0) return {phi, 0.0};
    const Vec2 w = h(polar_point(phi, rho));
    const double c0 = std::cos(phi0);
    const double s0 = std::sin(phi0);
    const double den = w.x * c0 + w.y * s0;
    const double num = w.y * c0 - w.x * s0;
    if (den <= 0.0) throw std::domain_error("image left the chart around phi0");
    const double phi_new = phi0 + std::atan(num / den);
    return {phi_new, den / std::cos(phi_new - phi0)};
}

ScalarField descend_flat(std::function<double(double, double)> a_lifted, bool check_flatness) {
    for (double rho : probe_radii())
        for (double phi : probe_angles())
            if (std::abs(a_lifted(phi + kTwoPi, rho) - a_lifted(phi, rho)) > 1e-9)
                throw NotZInvariant("input is not invariant under phi -> phi + 2 pi");

    ScalarField g;
    g.eval = [a_lifted](Vec2 z) {
        const double rho = norm(z);
        if (rho == 0.0) return 0.0;
        return a_lifted(std::atan2(z.y, z.x), rho);
    };

    if (check_flatness) {
        const auto ok = flatness_order(g, {1, 2, 3, 4}, probe_radii());
        for (bool b : ok)
            if (!b) throw NotFlat("descended function is not flat at the origin");
    }
    return g;
}

std::vector<bool> flatness_order(const ScalarField& g, const std::vector<int>& orders,
                                 const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("flatness_order: no radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || radii[i] > 0.5)
            throw std::invalid_argument("flatness_order: radii must lie in (0, 0.5]");
        if (i > 0 && radii[i] >= radii[i - 1])
            throw std::invalid_argument("flatness_order: radii must decrease");
    }

    std::vector<double> sup(radii.size(), 0.0);
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (int j = 0; j < 16; ++j)
            sup[i] = std::max(sup[i], std::abs(g.eval(polar_point(kTwoPi * j / 16.0, radii[i]))));

    /* evaluations near machine epsilon are noise, not decay failures */
    const double floor = 1e-13;
    std::vector<bool> result;
    result.reserve(orders.size());
    for (int k : orders) {
        const double scale = sup[0] / std::pow(radii[0], k);
        bool ok = true;
        for (std::size_t i = 1; i < radii.size() && ok; ++i)
            ok = sup[i] <= floor + scale * std::pow(radii[i], k) * (1.0 + 1e-9);
        result.push_back(ok);
    }
    return result;
}

double z_invariance_defect(const PolarField& pf) {
    double worst = 0.0;
    auto radii = probe_radii();
    radii.push_back(0.0);
    for (double rho : radii) {
        for (double phi : probe_angles()) {
            worst = std::max(worst, std::abs(pf.phi_component(phi + kTwoPi, rho) -
                                             pf.phi_component(phi, rho)));
            worst = std::max(worst, std::abs(pf.rho_component(phi + kTwoPi, rho) -
                                             pf.rho_component(phi, rho)));
        }
    }
    return worst;
}

double axis_tangency_defect(const PolarField& pf) {
    double worst = 0.0;
    for (double phi : probe_angles())
        worst = std::max(worst, std::abs(pf.rho_component(phi, 0.0)));
    return worst;
}

std::vector<double> probe_angles() {
    std::vector<double> out;
    out.reserve(32);
    for (int j = 0; j < 32; ++j) out.push_back(kTwoPi * j / 32.0);
    return out;
}

std::vector<double> probe_radii() {
    std::vector<double> out;
    out.reserve(8);
    for (int i = 0; i < 8; ++i) out.push_back(0.5 * std::pow(2.0, -i));
    return out;
}

}  // namespace centerkit

#include "centerkit/shift.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "centerkit/errors.hpp"
#include "centerkit/linalg.hpp"
#include "centerkit/quadrature.hpp"

namespace centerkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

using Cx = std::complex<double>;

Cx gamma_at(const std::function<Vec2(Vec2)>& h, Vec2 z, double t, double tau) {
    if (t == 0.0) return {tau, 0.0};
    const Vec2 zt{t * z.x, t * z.y};
    const Vec2 w = h(zt);
    const Cx g = Cx(w.x, w.y) / Cx(zt.x, zt.y);
    if (std::abs(g) < 1e-12) throw VanishingImage("map image vanishes away from the origin");
    return g;
}

double arg_increment(const std::function<Vec2(Vec2)>& h, Vec2 z, double tau, Cx prev,
                     double t_prev, Cx cur, double t_cur, int depth) {
    const double d = std::arg(cur / prev);
    if (std::abs(d) <= kHalfPi) return d;
    if (depth >= 24) throw VanishingImage("continuous argument tracking lost");
    const double tm = 0.5 * (t_prev + t_cur);
    const Cx mid = gamma_at(h, z, tm, tau);
    return arg_increment(h, z, tau, prev, t_prev, mid, tm, depth + 1) +
           arg_increment(h, z, tau, mid, tm, cur, t_cur, depth + 1);
}

void require_scalar_jet(const SquareMatrix& jet, double tau) {
    const double tol = 1e-6 * std::max(1.0, std::abs(tau));
    if (tau <= 0.0 || std::abs(jet(0, 1)) > tol || std::abs(jet(1, 0)) > tol ||
        std::abs(jet(0, 0) - jet(1, 1)) > tol)
        throw JetNotScalar("1-jet at the origin is not a positive scalar");
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

void require_orbit_preserving(const PlanarField& f, const std::function<Vec2(Vec2)>& h,
                              const std::vector<Vec2>& samples, const IntegratorConfig& cfg) {
    const auto integral = first_integral(f);
    if (integral) {
        for (const Vec2& z : samples) {
            const double before = integral->eval(z);
            const double after = integral->eval(h(z));
            if (std::abs(after - before) > 1e-7 * std::max(1.0, std::abs(before)))
                throw NotOrbitPreserving("map moves points across level sets");
        }
        return;
    }
    for (const Vec2& z : samples) {
        if (norm(z) == 0.0) continue;
        const double theta = period(f, z, cfg);
        const Vec2 target = h(z);
        const int segments = 1024;
        Vec2 prev = z;
        double best = norm(target - prev);
        for (int k = 1; k <= segments; ++k) {
            const Vec2 cur = flow(f, prev, theta / segments, cfg);
            best = std::min(best, point_segment_distance(target, prev, cur));
            prev = cur;
        }
        if (best > 1e-5) throw NotOrbitPreserving("image point misses the orbit");
    }
}

}  // namespace

SquareMatrix map_jet(const std::function<Vec2(Vec2)>& h) {
    auto diff = [&](double step) {
        SquareMatrix j(2);
        const Vec2 xp = h({step, 0.0}), xm = h({-step, 0.0});
        const Vec2 yp = h({0.0, step}), ym = h({0.0, -step});
        j(0, 0) = (xp.x - xm.x) / (2.0 * step);
        j(1, 0) = (xp.y - xm.y) / (2.0 * step);
        j(0, 1) = (yp.x - ym.x) / (2.0 * step);
        j(1, 1) = (yp.y - ym.y) / (2.0 * step);
        return j;
    };
    const double step = 1e-4;
    const SquareMatrix d1 = diff(step);
    const SquareMatrix d2 = diff(step / 2.0);
    SquareMatrix out(2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) out(i, k) = (4.0 * d2(i, k) - d1(i, k)) / 3.0;
    return out;
}

GammaDecomposition gamma_decompose(std::function<Vec2(Vec2)> h, double tau) {
    if (norm(h({0.0, 0.0})) > 1e-10) throw NotOriginPreserving("map does not fix the origin");
    require_scalar_jet(map_jet(h), tau);

    GammaDecomposition g;
    g.tau = tau;
    g.magnitude = [h, tau](Vec2 z) {
        const double r = norm(z);
        if (r == 0.0) return tau;
        return norm(h(z)) / r;
    };
    g.angle = [h, tau](Vec2 z) {
        if (norm(z) == 0.0) return 0.0;
        const int steps = 96;
        double total = 0.0;
        Cx prev{tau, 0.0};
        double t_prev = 0.0;
        for (int k = 1; k <= steps; ++k) {
            const double t = static_cast<double>(k) / steps;
            const Cx cur = gamma_at(h, z, t, tau);
            total += arg_increment(h, z, tau, prev, t_prev, cur, t, 0);
            prev = cur;
            t_prev = t;
        }
        return total;
    };
    return g;
}

OmegaSplit omega_extract(const std::function<Vec2(Vec2)>& h, const PlanarField& f) {
    const SquareMatrix a = linearize(f);
    if (a.max_abs() <= 1e-12) throw NotInFamily("linear part of the field vanishes");
    const JacobiClass jc = jacobi_classify(map_jet(h), a, 1e-6);
    if (jc.family != JacobiFamily::rotation && jc.family != JacobiFamily::unipotent_plus)
        throw OrientationReversing("1-jet matches a non-flow branch of the family");

    OmegaSplit split;
    split.omega = jc.omega;
    split.h1 = [h, f, omega = jc.omega](Vec2 z) { return flow(f, h(z), -omega); };
    return split;
}

double period_integral(const std::function<double(double, double)>& phibar, double rho,
                       double phi0) {
    auto g = [&](double s) {
        const double d = 1.0 + phibar(s, rho);
        if (d <= 0.0) throw SingularIntegrand("1 + phibar is not positive");
        return 1.0 / d;
    };
    return integrate(g, phi0, phi0 + kTwoPi, 1e-10);
}

double sigma_from_lift(const std::function<double(double, double)>& phibar,
                       const LiftedMap& lifted, double phi, double rho) {
    const double target = lifted.phi_map(phi, rho);
    auto g = [&](double s) {
        const double d = 1.0 + phibar(s, rho);
        if (d <= 0.0) throw SingularIntegrand("1 + phibar is not positive");
        return 1.0 / d;
    };
    return integrate(g, phi, target, 1e-10);
}

ShiftGrid recover_shift(const PlanarField& f, const std::function<Vec2(Vec2)>& h,
                        const std::vector<Vec2>& samples, const IntegratorConfig& cfg) {
    {
        std::vector<double> radii;
        for (int i = 0; i <= 9; ++i) radii.push_back(0.2 * std::pow(2.0, -i));
        const PeriodProfile prof = period_profile(f, 0.0, radii, cfg);
        if (prof.verdict != PeriodVerdict::ptc)
            throw NotPTC("period function does not extend over the origin");
    }
    require_orbit_preserving(f, h, samples, cfg);

    const OmegaSplit split = omega_extract(h, f);
    const GammaDecomposition g1 = gamma_decompose(split.h1, 1.0);
    const PolarField lift = lift_field(f);

    ShiftGrid grid;
    grid.points = samples;
    for (const Vec2& z : samples) {
        double sigma = split.omega;
        if (norm(z) > 0.0) {
            const PolarPoint w = unpolar(z);
            const double advance = g1.angle(z);
            sigma += time_to_angle(lift, w, w.phi + advance, cfg);
        }
        const double res = norm(flow(f, z, sigma, cfg) - h(z));
        grid.sigma.push_back(sigma);
        grid.residuals.push_back(res);
        grid.max_residual = std::max(grid.max_residual, res);
    }
    return grid;
}

bool gamma_set_membership(const PlanarField& f, const ScalarField& alpha,
                          const std::vector<Vec2>& samples, double margin) {
    for (const Vec2& z : samples) {
        const Vec2 v = f.eval(z);
        double dv;
        if (alpha.gradient) {
            dv = dot(alpha.gradient(z), v);
        } else {
            const double n = norm(v);
            if (n == 0.0) continue;
            const double step = 1e-5 / std::max(1.0, n);
            dv = (alpha.eval(z + step * v) - alpha.eval(z - step * v)) / (2.0 * step);
        }
        if (!(dv > -1.0 + margin)) return false;
    }
    return true;
}

}  // namespace centerkit

#include "centerkit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "centerkit/errors.hpp"
#include "centerkit/ode.hpp"
#include "json.hpp"

namespace centerkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

OdeLimits limits_for(const IntegratorConfig& cfg, double budget) {
    OdeLimits lim;
    lim.rel_tol = cfg.rel_tol;
    lim.abs_tol = cfg.abs_tol;
    lim.max_step = cfg.max_step;
    lim.max_time = budget;
    return lim;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/* Runs until time t and returns the state there; escape_index selects the
   coordinate checked against the disk (1 = polar radius), -1 checks the
   euclidean norm of the state. */
OdeState run_until_time(const OdeRhs& rhs, OdeState y0, double t, int escape_index,
                        const IntegratorConfig& cfg) {
    if (t == 0.0) return y0;
    const double bound = 1.0 + cfg.disk_tol;
    auto too_far = [&](const OdeState& y) {
        if (escape_index < 0) return std::hypot(y[0], y[1]) > bound;
        return y[escape_index] > bound;
    };
    if (too_far(y0)) throw Escape("start point lies outside the unit disk");

    Dp5Integrator integ(rhs, limits_for(cfg, std::abs(t) * (1.0 + 1e-12) + 1.0));
    const double dir = t > 0.0 ? 1.0 : -1.0;
    const double teps = 1e-14 * std::max(1.0, std::abs(t));
    OdeState out = y0;
    integ.run(0.0, y0, dir, [&](const DenseSegment& seg) {
        if (too_far(seg.eval(0.5)) || too_far(seg.eval(1.0)))
            throw Escape("trajectory left the unit disk");
        if ((seg.t_end() - t) * dir >= 0.0) {
            const double need = t - seg.t0;
            if (std::abs(seg.h - need) <= teps) {
                out = seg.eval(1.0);
                return OdeControl::stop();
            }
            if (std::abs(need) <= teps) {
                out = seg.y0;
                return OdeControl::stop();
            }
            return OdeControl::retry_with(std::abs(need));
        }
        return OdeControl::proceed();
    });
    return out;
}

}  // namespace

std::string to_string(PeriodVerdict v) {
    switch (v) {
        case PeriodVerdict::ptc: return "PTC";
        case PeriodVerdict::divergent: return "Divergent";
        case PeriodVerdict::inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

Vec2 flow(const PlanarField& f, Vec2 z, double t, const IntegratorConfig& cfg) {
    OdeRhs rhs = [eval = f.eval](const OdeState& y) {
        const Vec2 v = eval({y[0], y[1]});
        return OdeState{v.x, v.y};
    };
    const OdeState out = run_until_time(rhs, {z.x, z.y}, t, -1, cfg);
    return {out[0], out[1]};
}

PolarPoint polar_flow(const PolarField& pf, PolarPoint w, double t, const IntegratorConfig& cfg) {
    OdeRhs rhs = [&pf](const OdeState& y) {
        return OdeState{pf.phi_component(y[0], y[1]), pf.rho_component(y[0], y[1])};
    };
    const OdeState out = run_until_time(rhs, {w.phi, w.rho}, t, 1, cfg);
    return {out[0], out[1]};
}

namespace {

struct AngleHit {
    double t = 0.0;
    double rho = 0.0;
};

/* Follows the lifted orbit from `from` until phi reaches target (signed
   time), locating the hit with dense-output bisection and a few Newton
   polish steps. */
AngleHit hit_angle(const PolarField& pf, PolarPoint from, double target,
                   const IntegratorConfig& cfg) {
    const double delta = target - from.phi;
    if (delta == 0.0) return {0.0, from.rho};
    const double rate0 = pf.phi_component(from.phi, from.rho);
    if (std::abs(rate0) < 1e-14) throw NoReturn("angular rate vanishes at the start point");
    const double dir = delta * rate0 > 0.0 ? 1.0 : -1.0;
    const double s = delta > 0.0 ? 1.0 : -1.0;  // sign of the required advance

    OdeRhs rhs = [&pf](const OdeState& y) {
        return OdeState{pf.phi_component(y[0], y[1]), pf.rho_component(y[0], y[1])};
    };

    Dp5Integrator integ(rhs, limits_for(cfg, cfg.max_time));
    AngleHit hit;
    bool found = false;
    integ.run(0.0, {from.phi, from.rho}, dir, [&](const DenseSegment& seg) {
        const OdeState mid = seg.eval(0.5);
        const OdeState end = seg.eval(1.0);
        if (mid[1] > 1.0 + cfg.disk_tol || end[1] > 1.0 + cfg.disk_tol)
            throw Escape("orbit left the unit disk");

        const double dphi = end[0] - seg.y0[0];
        if (std::abs(dphi) > 1.6)
            return OdeControl::retry_with(std::abs(seg.h) * 1.2 / std::abs(dphi));
        if ((end[0] - from.phi) * s < -0.5) throw NoReturn("angular advance reversed");

        if ((end[0] - target) * s >= 0.0) {
            double a = 0.0, b = 1.0;
            for (int i = 0; i < 60; ++i) {
                const double m = 0.5 * (a + b);
                if ((seg.eval(m)[0] - target) * s < 0.0)
                    a = m;
                else
                    b = m;
            }
            double theta = 0.5 * (a + b);
            for (int i = 0; i < 3; ++i) {
                const OdeState y = seg.eval(theta);
                const double slope = seg.h * pf.phi_component(y[0], y[1]);
                if (slope == 0.0) break;
                theta = std::clamp(theta - (y[0] - target) / slope, 0.0, 1.0);
            }
            hit.t = seg.t0 + theta * seg.h;
            hit.rho = seg.eval(theta)[1];
            found = true;
            return OdeControl::stop();
        }
        return OdeControl::proceed();
    });
    if (!found) throw NoReturn("angle target not reached");
    return hit;
}

}  // namespace

double time_to_angle(const PolarField& pf, PolarPoint from, double target_phi,
                     const IntegratorConfig& cfg) {
    return hit_angle(pf, from, target_phi, cfg).t;
}

double period(const PlanarField& f, Vec2 z, const IntegratorConfig& cfg) {
    if (norm(z) == 0.0) throw OriginHasNoAngle("period is undefined at the singular point");
    if (norm(z) > 1.0 + cfg.disk_tol) throw Escape("start point lies outside the unit disk");

    const PolarField lift = lift_field(f);
    const PolarPoint w0 = unpolar(z);
    const double rate0 = lift.phi_component(w0.phi, w0.rho);
    if (std::abs(rate0) < 1e-14) throw NoReturn("angular rate vanishes at the start point");
    const double s = rate0 > 0.0 ? 1.0 : -1.0;

    const AngleHit hit = hit_angle(lift, w0, w0.phi + s * kTwoPi, cfg);
    if (std::abs(hit.rho - w0.rho) > 1e-6)
        throw NoReturn("orbit fails to close up in radius");
    return hit.t;
}

PeriodProfile period_profile(const PlanarField& f, double ray_angle,
                             const std::vector<double>& radii, const IntegratorConfig& cfg) {
    if (radii.empty()) throw std::invalid_argument("period_profile: no radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || radii[i] > 1.0)
            throw std::invalid_argument("period_profile: radii must lie in (0, 1]");
        if (i > 0 && radii[i] >= radii[i - 1])
            throw std::invalid_argument("period_profile: radii must decrease");
    }

    PeriodProfile prof;
    prof.ray_angle = ray_angle;
    prof.limit = nan_value();

    for (double r : radii) {
        PeriodSample smp;
        smp.radius = r;
        try {
            smp.theta = period(f, polar_point(ray_angle, r), cfg);
            smp.converged = true;
        } catch (const NoReturn&) {
            smp.theta = nan_value();
            smp.converged = false;
        }
        prof.samples.push_back(smp);
    }

    std::vector<double> th, rs;
    for (const auto& smp : prof.samples) {
        if (smp.converged) {
            th.push_back(smp.theta);
            rs.push_back(smp.radius);
        }
    }
    const std::size_t n = th.size();
    if (n < 3) return prof;

    const std::size_t m = std::min<std::size_t>(5, n);
    const std::size_t first = n - m;

    bool cauchy = true;
    for (std::size_t i = first; i + 1 < n; ++i)
        cauchy = cauchy && std::abs(th[i + 1] - th[i]) < 1e-4 * std::abs(th[i + 1]);

    if (cauchy) {
        double limit = th[n - 1];
        const double denom = th[n - 1] - 2.0 * th[n - 2] + th[n - 3];
        if (std::abs(denom) >= 1e-12 * std::max(1.0, std::abs(th[n - 1]))) {
            const double d = th[n - 1] - th[n - 2];
            const double accel = th[n - 1] - d * d / denom;
            if (std::abs(accel - th[n - 1]) <= std::abs(th[n - 1] - th[n - 2])) limit = accel;
        }
        bool approaching = true;
        for (std::size_t i = first; i + 1 < n; ++i)
            approaching = approaching && std::abs(th[i + 1] - limit) <=
                                             std::abs(th[i] - limit) + 1e-8 * std::abs(th[i]);
        if (approaching) {
            prof.verdict = PeriodVerdict::ptc;
            prof.limit = limit;
            return prof;
        }
    }

    bool increasing = true;
    for (std::size_t i = first; i + 1 < n; ++i) increasing = increasing && th[i + 1] > th[i];
    const bool doubled = th[n - 1] > 2.0 * th[0];

    int strong_pairs = 0;
    bool pairs_ok = true;
    for (std::size_t j = n; j-- > 0 && strong_pairs < 3;) {
        for (std::size_t i = 0; i < j; ++i) {
            const double ratio = rs[j] / rs[i];
            if (ratio >= 0.45 && ratio <= 0.55) {
                pairs_ok = pairs_ok && th[j] >= 1.1 * th[i];
                ++strong_pairs;
                break;
            }
        }
    }

    if (increasing && doubled && strong_pairs >= 3 && pairs_ok)
        prof.verdict = PeriodVerdict::divergent;
    return prof;
}

std::string PeriodProfile::to_csv() const {
    std::string out = "radius,theta,converged\n";
    for (const auto& smp : samples) {
        out += format_g17(smp.radius);
        out += ',';
        out += format_g17(smp.theta);
        out += ',';
        out += smp.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string PeriodProfile::to_json() const {
    nlohmann::json j;
    j["ray_angle"] = ray_angle;
    j["verdict"] = centerkit::to_string(verdict);
    if (std::isnan(limit))
        j["limit"] = nullptr;
    else
        j["limit"] = limit;
    j["samples"] = nlohmann::json::array();
    for (const auto& smp : samples) {
        nlohmann::json s;
        s["radius"] = smp.radius;
        if (std::isnan(smp.theta))
            s["theta"] = nullptr;
        else
            s["theta"] = smp.theta;
        s["converged"] = smp.converged;
        j["samples"].push_back(s);
    }
    return j.dump(2);
}

Vec2 shift_apply(const PlanarField& f, const ScalarField& alpha, Vec2 z,
                 const IntegratorConfig& cfg) {
    return flow(f, z, alpha.eval(z), cfg);
}

double kernel_residual(const PlanarField& f, const ScalarField& mu, int n,
                       const std::vector<Vec2>& samples, const IntegratorConfig& cfg) {
    double worst = 0.0;
    for (const Vec2& z : samples) {
        if (norm(z) == 0.0)
            throw std::invalid_argument("kernel_residual: samples must avoid the origin");
        const Vec2 w = flow(f, z, n * mu.eval(z), cfg);
        worst = std::max(worst, norm(w - z));
    }
    return worst;
}

}  // namespace centerkit

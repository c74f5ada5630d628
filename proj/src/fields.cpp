#include "centerkit/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "centerkit/errors.hpp"

namespace centerkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

std::shared_ptr<const FieldMeta> share(FieldMeta m) {
    return std::make_shared<const FieldMeta>(std::move(m));
}

}  // namespace

double FlatPart::eval(Vec2 z) const {
    const double u = z.x * z.x + z.y * z.y;
    if (u == 0.0 || c == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& [i, j, coeff] : poly) s += coeff * ipow(z.x, i) * ipow(z.y, j);
    return c * std::exp(-1.0 / u) * s;
}

Vec2 FlatPart::gradient(Vec2 z) const {
    const double u = z.x * z.x + z.y * z.y;
    if (u == 0.0 || c == 0.0) return {0.0, 0.0};
    double s = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& [i, j, coeff] : poly) {
        s += coeff * ipow(z.x, i) * ipow(z.y, j);
        if (i > 0) sx += coeff * i * ipow(z.x, i - 1) * ipow(z.y, j);
        if (j > 0) sy += coeff * j * ipow(z.x, i) * ipow(z.y, j - 1);
    }
    const double e = c * std::exp(-1.0 / u);
    const double u2 = u * u;
    return {e * (sx + s * 2.0 * z.x / u2), e * (sy + s * 2.0 * z.y / u2)};
}

double PolyXY::eval(Vec2 z) const {
    double s = 0.0;
    for (const auto& [i, j, coeff] : terms) s += coeff * ipow(z.x, i) * ipow(z.y, j);
    return s;
}

Vec2 PolyXY::gradient(Vec2 z) const {
    double sx = 0.0, sy = 0.0;
    for (const auto& [i, j, coeff] : terms) {
        if (i > 0) sx += coeff * i * ipow(z.x, i - 1) * ipow(z.y, j);
        if (j > 0) sy += coeff * j * ipow(z.x, i) * ipow(z.y, j - 1);
    }
    return {sx, sy};
}

PlanarField make_rotation(double b) {
    if (b == 0.0 || !std::isfinite(b)) throw InvalidSpec("rotation rate must be nonzero");
    PlanarField f;
    f.eval = [b](Vec2 z) { return Vec2{-b * z.y, b * z.x}; };
    f.jacobian = [b](Vec2) { return SquareMatrix{{0.0, -b}, {b, 0.0}}; };
    f.meta = share(RotationSpec{b});
    f.claims_boundary_tangency = true;
    return f;
}

PlanarField make_monomial(int p, int q, double b) {
    if (p < 1 || q < 1) throw InvalidSpec("monomial exponents must be >= 1");
    if (b == 0.0 || !std::isfinite(b)) throw InvalidSpec("coefficient must be nonzero");
    PlanarField f;
    f.eval = [p, q, b](Vec2 z) {
        return Vec2{-b * q * ipow(z.y, 2 * q - 1), b * p * ipow(z.x, 2 * p - 1)};
    };
    f.jacobian = [p, q, b](Vec2 z) {
        return SquareMatrix{{0.0, -b * q * (2 * q - 1) * ipow(z.y, 2 * q - 2)},
                            {b * p * (2 * p - 1) * ipow(z.x, 2 * p - 2), 0.0}};
    };
    f.meta = share(MonomialSpec{p, q, b});
    f.claims_boundary_tangency = (p == 1 && q == 1);
    return f;
}

namespace {

double form_value(const SquareMatrix& m, Vec2 z) {
    return m(0, 0) * z.x * z.x + 2.0 * m(0, 1) * z.x * z.y + m(1, 1) * z.y * z.y;
}

Vec2 form_gradient(const SquareMatrix& m, Vec2 z) {
    return {2.0 * (m(0, 0) * z.x + m(0, 1) * z.y), 2.0 * (m(0, 1) * z.x + m(1, 1) * z.y)};
}

void validate_forms(const std::vector<SquareMatrix>& forms) {
    if (forms.empty()) throw InvalidSpec("quadratic product needs at least one form");
    for (const auto& m : forms) {
        if (m.dim() != 2) throw InvalidSpec("forms must be 2x2");
        const double scale = std::max(1.0, m.max_abs());
        if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * scale)
            throw InvalidSpec("forms must be symmetric");
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (m(0, 0) <= 0.0 || det <= 0.0) throw InvalidSpec("forms must be positive definite");
    }
    const Vec2 probes[3] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    for (size_t i = 0; i < forms.size(); ++i)
        for (size_t j = i + 1; j < forms.size(); ++j) {
            double r0 = form_value(forms[i], probes[0]) / form_value(forms[j], probes[0]);
            bool proportional = true;
            for (int d = 1; d < 3; ++d) {
                double r = form_value(forms[i], probes[d]) / form_value(forms[j], probes[d]);
                if (std::abs(r - r0) > 1e-12 * std::abs(r0)) proportional = false;
            }
            if (proportional) throw InvalidSpec("forms must not be proportional");
        }
}

}  // namespace

PlanarField make_quadratic_product(std::vector<SquareMatrix> forms) {
    validate_forms(forms);
    const size_t n = forms.size();

    auto values = [forms, n](Vec2 z, std::vector<double>& q, std::vector<Vec2>& gq) {
        q.resize(n);
        gq.resize(n);
        for (size_t i = 0; i < n; ++i) {
            q[i] = form_value(forms[i], z);
            gq[i] = form_gradient(forms[i], z);
        }
    };
    auto prod_excl = [n](const std::vector<double>& q, size_t skip) {
        double p = 1.0;
        for (size_t i = 0; i < n; ++i)
            if (i != skip) p *= q[i];
        return p;
    };
    auto prod_excl2 = [n](const std::vector<double>& q, size_t s1, size_t s2) {
        double p = 1.0;
        for (size_t i = 0; i < n; ++i)
            if (i != s1 && i != s2) p *= q[i];
        return p;
    };

    PlanarField f;
    f.eval = [values, prod_excl, n](Vec2 z) {
        std::vector<double> q;
        std::vector<Vec2> gq;
        values(z, q, gq);
        double fx = 0.0, fy = 0.0;
        for (size_t j = 0; j < n; ++j) {
            const double pj = prod_excl(q, j);
            fx += gq[j].x * pj;
            fy += gq[j].y * pj;
        }
        return Vec2{-fy, fx};
    };
    f.jacobian = [forms, values, prod_excl, prod_excl2, n](Vec2 z) {
        std::vector<double> q;
        std::vector<Vec2> gq;
        values(z, q, gq);
        auto hess = [&](int a, int b) {
            double s = 0.0;
            for (size_t j = 0; j < n; ++j) {
                s += 2.0 * forms[j](a, b) * prod_excl(q, j);
                const double ga = a == 0 ? gq[j].x : gq[j].y;
                for (size_t k = 0; k < n; ++k) {
                    if (k == j) continue;
                    const double gb = b == 0 ? gq[k].x : gq[k].y;
                    s += ga * gb * prod_excl2(q, j, k);
                }
            }
            return s;
        };
        return SquareMatrix{{-hess(1, 0), -hess(1, 1)}, {hess(0, 0), hess(0, 1)}};
    };

    bool isotropic = true;
    for (const auto& m : forms) {
        const double scale = std::max(1.0, m.max_abs());
        if (std::abs(m(0, 0) - m(1, 1)) > 1e-14 * scale || std::abs(m(0, 1)) > 1e-14 * scale)
            isotropic = false;
    }
    f.claims_boundary_tangency = isotropic;
    f.meta = share(QuadraticProductSpec{std::move(forms)});
    return f;
}

namespace {

double poly_in(const std::vector<double>& coeffs, double u) {
    double s = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) s = s * u + coeffs[i];
    return s;
}

double poly_in_deriv(const std::vector<double>& coeffs, double u) {
    double s = 0.0;
    for (size_t i = coeffs.size(); i-- > 1;) s = s * u + static_cast<double>(i) * coeffs[i];
    return s;
}

}  // namespace

PlanarField make_takens_flat(TakensFlatSpec spec) {
    if (spec.beta.empty() || spec.beta[0] == 0.0)
        throw InvalidSpec("profile must be nonzero at the origin");

    const auto beta = spec.beta;
    const FlatPart xbar = spec.xbar, ybar = spec.ybar;

    PlanarField f;
    f.eval = [beta, xbar, ybar](Vec2 z) {
        const double u = z.x * z.x + z.y * z.y;
        const double bv = poly_in(beta, u);
        return Vec2{-bv * (z.y + ybar.eval(z)), bv * (z.x + xbar.eval(z))};
    };
    f.jacobian = [beta, xbar, ybar](Vec2 z) {
        const double u = z.x * z.x + z.y * z.y;
        const double bv = poly_in(beta, u);
        const double bd = poly_in_deriv(beta, u);
        const double yy = z.y + ybar.eval(z);
        const double xx = z.x + xbar.eval(z);
        const Vec2 gx = xbar.gradient(z);
        const Vec2 gy = ybar.gradient(z);
        return SquareMatrix{
            {-bd * 2.0 * z.x * yy - bv * gy.x, -bd * 2.0 * z.y * yy - bv * (1.0 + gy.y)},
            {bd * 2.0 * z.x * xx + bv * (1.0 + gx.x), bd * 2.0 * z.y * xx + bv * gx.y}};
    };
    f.claims_boundary_tangency = xbar.zero() && ybar.zero();
    f.meta = share(std::move(spec));
    return f;
}

PlanarField make_takens_nonflat(int delta, int k, double alpha) {
    if (delta != 1 && delta != -1) throw InvalidSpec("delta must be +1 or -1");
    if (k < 1) throw InvalidSpec("k must be >= 1");
    if (!std::isfinite(alpha)) throw InvalidSpec("alpha must be finite");

    PlanarField f;
    f.eval = [delta, k, alpha](Vec2 z) {
        const double u = z.x * z.x + z.y * z.y;
        const double g = delta * ipow(u, k) + alpha * ipow(u, 2 * k);
        return Vec2{-kTwoPi * z.y + g * z.x, kTwoPi * z.x + g * z.y};
    };
    f.jacobian = [delta, k, alpha](Vec2 z) {
        const double u = z.x * z.x + z.y * z.y;
        const double g = delta * ipow(u, k) + alpha * ipow(u, 2 * k);
        const double gd = delta * k * ipow(u, k - 1) + alpha * 2 * k * ipow(u, 2 * k - 1);
        return SquareMatrix{{g + 2.0 * z.x * z.x * gd, -kTwoPi + 2.0 * z.x * z.y * gd},
                            {kTwoPi + 2.0 * z.x * z.y * gd, g + 2.0 * z.y * z.y * gd}};
    };
    f.meta = share(TakensNonflatSpec{delta, k, alpha});
    f.claims_boundary_tangency = false;
    return f;
}

PlanarField make_polynomial_field(PolynomialSpec spec) {
    for (const auto& comp : {spec.f1, spec.f2})
        for (const auto& [i, j, coeff] : comp.terms) {
            (void)coeff;
            if (i < 0 || j < 0) throw InvalidSpec("polynomial exponents must be >= 0");
        }
    const PolyXY f1 = spec.f1, f2 = spec.f2;
    PlanarField f;
    f.eval = [f1, f2](Vec2 z) { return Vec2{f1.eval(z), f2.eval(z)}; };
    f.jacobian = [f1, f2](Vec2 z) {
        const Vec2 g1 = f1.gradient(z);
        const Vec2 g2 = f2.gradient(z);
        return SquareMatrix{{g1.x, g1.y}, {g2.x, g2.y}};
    };
    f.meta = share(std::move(spec));
    f.claims_boundary_tangency = false;
    return f;
}

PlanarField make_custom(std::function<Vec2(Vec2)> eval,
                        std::function<SquareMatrix(Vec2)> jacobian) {
    if (!eval) throw InvalidSpec("custom field needs an evaluator");
    PlanarField f;
    f.eval = std::move(eval);
    f.jacobian = std::move(jacobian);
    return f;
}

namespace {

using nlohmann::json;

std::vector<std::tuple<int, int, double>> parse_terms(const json& arr) {
    std::vector<std::tuple<int, int, double>> terms;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3) throw InvalidSpec("term must be [i, j, coeff]");
        terms.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
    }
    return terms;
}

FlatPart parse_flat_part(const json& j) {
    FlatPart fp;
    if (j.is_null()) return fp;
    fp.c = j.value("c", 0.0);
    if (j.contains("poly")) fp.poly = parse_terms(j.at("poly"));
    return fp;
}

}  // namespace

PlanarField make_field(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad field description: ") + e.what());
    }
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "rotation") return make_rotation(j.at("b").get<double>());
        if (type == "monomial" || type == "monomial_hamiltonian")
            return make_monomial(j.at("p").get<int>(), j.at("q").get<int>(), j.value("b", 1.0));
        if (type == "quadratic_product") {
            std::vector<SquareMatrix> forms;
            for (const auto& m : j.at("forms")) {
                if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
                    throw InvalidSpec("each form must be a 2x2 matrix");
                forms.push_back(SquareMatrix{{m[0][0].get<double>(), m[0][1].get<double>()},
                                             {m[1][0].get<double>(), m[1][1].get<double>()}});
            }
            return make_quadratic_product(std::move(forms));
        }
        if (type == "takens_flat") {
            TakensFlatSpec spec;
            if (j.contains("beta")) spec.beta = j.at("beta").get<std::vector<double>>();
            spec.xbar = parse_flat_part(j.value("xbar", json()));
            spec.ybar = parse_flat_part(j.value("ybar", json()));
            return make_takens_flat(std::move(spec));
        }
        if (type == "takens_nonflat")
            return make_takens_nonflat(j.at("delta").get<int>(), j.at("k").get<int>(),
                                       j.value("alpha", 0.0));
        if (type == "custom" || type == "polynomial") {
            PolynomialSpec spec;
            spec.f1.terms = parse_terms(j.at("f1"));
            spec.f2.terms = parse_terms(j.at("f2"));
            return make_polynomial_field(std::move(spec));
        }
        throw InvalidSpec("unknown field type: " + type);
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad field description: ") + e.what());
    }
}

SquareMatrix linearize(const PlanarField& f, double h) {
    if (f.jacobian) return f.jacobian(Vec2{0.0, 0.0});
    auto diff = [&f](double step) {
        SquareMatrix d(2);
        const Vec2 ex{step, 0.0}, ey{0.0, step};
        const Vec2 fxp = f.eval(ex), fxm = f.eval(-ex);
        const Vec2 fyp = f.eval(ey), fym = f.eval(-ey);
        d(0, 0) = (fxp.x - fxm.x) / (2.0 * step);
        d(1, 0) = (fxp.y - fxm.y) / (2.0 * step);
        d(0, 1) = (fyp.x - fym.x) / (2.0 * step);
        d(1, 1) = (fyp.y - fym.y) / (2.0 * step);
        return d;
    };
    const SquareMatrix d1 = diff(h);
    const SquareMatrix d2 = diff(h / 2.0);
    SquareMatrix out(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = (4.0 * d2(i, j) - d1(i, j)) / 3.0;
    return out;
}

PlanarField hamiltonian_of(const ScalarField& f) {
    if (!f.gradient) throw MissingGradient("scalar field has no gradient evaluator");
    PlanarField out;
    auto grad = f.gradient;
    out.eval = [grad](Vec2 z) {
        const Vec2 g = grad(z);
        return Vec2{-g.y, g.x};
    };
    return out;
}

PlanarField pushforward(const PlanarField& f, std::function<Vec2(Vec2)> g,
                        std::function<Vec2(Vec2)> g_inv,
                        std::function<SquareMatrix(Vec2)> jacobian_g) {
    (void)g;
    PlanarField out;
    auto eval = f.eval;
    out.eval = [eval, g_inv, jacobian_g](Vec2 z) {
        const Vec2 w = g_inv(z);
        const Vec2 v = eval(w);
        const SquareMatrix jg = jacobian_g(w);
        return Vec2{jg(0, 0) * v.x + jg(0, 1) * v.y, jg(1, 0) * v.x + jg(1, 1) * v.y};
    };
    return out;
}

std::optional<ScalarField> first_integral(const PlanarField& f) {
    if (!f.meta) return std::nullopt;
    if (const auto* rot = std::get_if<RotationSpec>(f.meta.get())) {
        const double b = rot->b;
        ScalarField s;
        s.eval = [b](Vec2 z) { return b * 0.5 * (z.x * z.x + z.y * z.y); };
        s.gradient = [b](Vec2 z) { return Vec2{b * z.x, b * z.y}; };
        return s;
    }
    if (const auto* mono = std::get_if<MonomialSpec>(f.meta.get())) {
        const int p = mono->p, q = mono->q;
        const double b = mono->b;
        ScalarField s;
        s.eval = [p, q, b](Vec2 z) { return b * 0.5 * (ipow(z.x, 2 * p) + ipow(z.y, 2 * q)); };
        s.gradient = [p, q, b](Vec2 z) {
            return Vec2{b * p * ipow(z.x, 2 * p - 1), b * q * ipow(z.y, 2 * q - 1)};
        };
        return s;
    }
    if (const auto* qp = std::get_if<QuadraticProductSpec>(f.meta.get())) {
        const auto forms = qp->forms;
        ScalarField s;
        s.eval = [forms](Vec2 z) {
            double p = 1.0;
            for (const auto& m : forms) p *= form_value(m, z);
            return p;
        };
        s.gradient = [forms](Vec2 z) {
            const size_t n = forms.size();
            std::vector<double> q(n);
            for (size_t i = 0; i < n; ++i) q[i] = form_value(forms[i], z);
            Vec2 g{0.0, 0.0};
            for (size_t j = 0; j < n; ++j) {
                double pj = 1.0;
                for (size_t i = 0; i < n; ++i)
                    if (i != j) pj *= q[i];
                const Vec2 gq = form_gradient(forms[j], z);
                g.x += gq.x * pj;
                g.y += gq.y * pj;
            }
            return g;
        };
        return s;
    }
    if (const auto* tf = std::get_if<TakensFlatSpec>(f.meta.get())) {
        if (tf->xbar.zero() && tf->ybar.zero()) {
            ScalarField s;
            s.eval = [](Vec2 z) { return 0.5 * (z.x * z.x + z.y * z.y); };
            s.gradient = [](Vec2 z) { return z; };
            return s;
        }
    }
    return std::nullopt;
}

double first_integral_residual(const PlanarField& f, const ScalarField& integral,
                               const std::vector<Vec2>& samples) {
    if (!integral.gradient) throw MissingGradient("scalar field has no gradient evaluator");
    double worst = 0.0;
    for (const Vec2& z : samples) {
        const Vec2 v = f.eval(z);
        const Vec2 g = integral.gradient(z);
        worst = std::max(worst, std::abs(dot(v, g)));
    }
    return worst;
}

}  // namespace centerkit

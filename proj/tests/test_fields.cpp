#include <cmath>
#include <random>
#include <vector>

#include "centerkit/errors.hpp"
#include "centerkit/fields.hpp"
#include "doctest.h"

using namespace centerkit;

namespace {

SquareMatrix fd_jacobian(const PlanarField& f, Vec2 z, double h = 1e-5) {
    SquareMatrix d(2);
    const Vec2 ex{h, 0.0}, ey{0.0, h};
    const Vec2 fxp = f.eval(z + ex), fxm = f.eval(z - ex);
    const Vec2 fyp = f.eval(z + ey), fym = f.eval(z - ey);
    d(0, 0) = (fxp.x - fxm.x) / (2.0 * h);
    d(1, 0) = (fxp.y - fxm.y) / (2.0 * h);
    d(0, 1) = (fyp.x - fym.x) / (2.0 * h);
    d(1, 1) = (fyp.y - fym.y) / (2.0 * h);
    return d;
}

void check_jacobian_consistency(const PlanarField& f, Vec2 z, double tol = 1e-6) {
    REQUIRE(f.jacobian);
    const SquareMatrix a = f.jacobian(z);
    const SquareMatrix d = fd_jacobian(f, z);
    CHECK((a - d).max_abs() <= tol * std::max(1.0, a.max_abs()));
}

std::vector<Vec2> sample_disk(int count, unsigned seed = 7) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> r(0.05, 0.95);
    std::uniform_real_distribution<double> a(0.0, 2.0 * M_PI);
    std::vector<Vec2> out;
    for (int i = 0; i < count; ++i) {
        const double rad = r(rng), ang = a(rng);
        out.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    return out;
}

}  // namespace

TEST_CASE("rotation field") {
    const PlanarField f = make_rotation(2.0);
    const Vec2 v = f.eval({0.3, -0.4});
    CHECK(v.x == doctest::Approx(0.8));
    CHECK(v.y == doctest::Approx(0.6));
    const SquareMatrix j = linearize(f);
    CHECK(j(0, 1) == doctest::Approx(-2.0));
    CHECK(j(1, 0) == doctest::Approx(2.0));
    CHECK(f.claims_boundary_tangency);
    CHECK_THROWS_AS(make_rotation(0.0), InvalidSpec);
}

TEST_CASE("monomial hamiltonian field") {
    const PlanarField f = make_monomial(2, 3, 0.5);
    const Vec2 z{0.6, -0.7};
    const Vec2 v = f.eval(z);
    CHECK(v.x == doctest::Approx(-0.5 * 3 * std::pow(z.y, 5)));
    CHECK(v.y == doctest::Approx(0.5 * 2 * std::pow(z.x, 3)));
    check_jacobian_consistency(f, z);
    CHECK_FALSE(f.claims_boundary_tangency);
    CHECK(make_monomial(1, 1, 1.0).claims_boundary_tangency);
    CHECK_THROWS_AS(make_monomial(0, 1, 1.0), InvalidSpec);
}

TEST_CASE("quadratic product field") {
    const SquareMatrix q1 = SquareMatrix::identity(2);
    const SquareMatrix q2{{2.0, 0.5}, {0.5, 1.0}};
    const PlanarField f = make_quadratic_product({q1, q2});

    // hamiltonian is the product of the two forms
    auto h = [&](Vec2 z) {
        const double a = z.x * z.x + z.y * z.y;
        const double b = 2.0 * z.x * z.x + z.x * z.y + z.y * z.y;
        return a * b;
    };
    const Vec2 z{0.4, 0.3};
    const double step = 1e-6;
    const double hx = (h({z.x + step, z.y}) - h({z.x - step, z.y})) / (2.0 * step);
    const double hy = (h({z.x, z.y + step}) - h({z.x, z.y - step})) / (2.0 * step);
    const Vec2 v = f.eval(z);
    CHECK(v.x == doctest::Approx(-hy).epsilon(1e-8));
    CHECK(v.y == doctest::Approx(hx).epsilon(1e-8));
    check_jacobian_consistency(f, z);
    CHECK_FALSE(f.claims_boundary_tangency);
    CHECK(make_quadratic_product({q1}).claims_boundary_tangency);

    CHECK_THROWS_AS(make_quadratic_product({}), InvalidSpec);
    CHECK_THROWS_AS(make_quadratic_product({SquareMatrix{{1.0, 0.3}, {0.0, 1.0}}}), InvalidSpec);
    CHECK_THROWS_AS(make_quadratic_product({SquareMatrix{{1.0, 0.0}, {0.0, -1.0}}}), InvalidSpec);
    CHECK_THROWS_AS(make_quadratic_product({q1, 2.0 * q1}), InvalidSpec);
}

TEST_CASE("flat perturbation term") {
    FlatPart fp;
    fp.c = 0.5;
    fp.poly = {{1, 0, 1.0}, {0, 2, 2.0}};
    CHECK(fp.eval({0.0, 0.0}) == 0.0);
    const Vec2 g0 = fp.gradient({0.0, 0.0});
    CHECK(g0.x == 0.0);
    CHECK(g0.y == 0.0);

    const Vec2 z{0.5, 0.2};
    const double r2 = z.x * z.x + z.y * z.y;
    const double expect = 0.5 * std::exp(-1.0 / r2) * (z.x + 2.0 * z.y * z.y);
    CHECK(fp.eval(z) == doctest::Approx(expect).epsilon(1e-12));

    const double step = 1e-6;
    const double gx = (fp.eval({z.x + step, z.y}) - fp.eval({z.x - step, z.y})) / (2.0 * step);
    const double gy = (fp.eval({z.x, z.y + step}) - fp.eval({z.x, z.y - step})) / (2.0 * step);
    const Vec2 g = fp.gradient(z);
    CHECK(g.x == doctest::Approx(gx).epsilon(1e-7));
    CHECK(g.y == doctest::Approx(gy).epsilon(1e-7));

    // decays faster than any power toward the origin
    for (int k = 1; k <= 6; ++k)
        CHECK(std::abs(fp.eval({0.05, 0.0})) <= std::pow(0.05, k));

    FlatPart zero;
    CHECK(zero.zero());
    CHECK_FALSE(fp.zero());
}

TEST_CASE("flat center family") {
    TakensFlatSpec spec;
    spec.beta = {1.0, 0.5};
    const PlanarField f = make_takens_flat(spec);
    const Vec2 z{0.3, 0.4};
    const double bv = 1.0 + 0.5 * 0.25;
    const Vec2 v = f.eval(z);
    CHECK(v.x == doctest::Approx(-bv * z.y));
    CHECK(v.y == doctest::Approx(bv * z.x));
    check_jacobian_consistency(f, z);
    CHECK(f.claims_boundary_tangency);

    TakensFlatSpec pert = spec;
    pert.xbar = FlatPart{0.5, {{1, 0, 1.0}}};
    const PlanarField g = make_takens_flat(pert);
    check_jacobian_consistency(g, z);
    CHECK_FALSE(g.claims_boundary_tangency);

    CHECK_THROWS_AS(make_takens_flat(TakensFlatSpec{{0.0}, {}, {}}), InvalidSpec);
}

TEST_CASE("nonflat center family") {
    const PlanarField f = make_takens_nonflat(-1, 2, 0.5);
    const Vec2 z{0.5, -0.3};
    const double u = z.x * z.x + z.y * z.y;
    const double g = -std::pow(u, 2) + 0.5 * std::pow(u, 4);
    const Vec2 v = f.eval(z);
    CHECK(v.x == doctest::Approx(-2.0 * M_PI * z.y + g * z.x));
    CHECK(v.y == doctest::Approx(2.0 * M_PI * z.x + g * z.y));
    check_jacobian_consistency(f, z);

    CHECK_THROWS_AS(make_takens_nonflat(0, 1, 0.0), InvalidSpec);
    CHECK_THROWS_AS(make_takens_nonflat(1, 0, 0.0), InvalidSpec);
}

TEST_CASE("polynomial field from term lists") {
    PolynomialSpec spec;
    spec.f1.terms = {{0, 1, -1.0}, {2, 1, 0.5}};
    spec.f2.terms = {{1, 0, 1.0}};
    const PlanarField f = make_polynomial_field(spec);
    const Vec2 z{0.4, 0.6};
    const Vec2 v = f.eval(z);
    CHECK(v.x == doctest::Approx(-z.y + 0.5 * z.x * z.x * z.y));
    CHECK(v.y == doctest::Approx(z.x));
    check_jacobian_consistency(f, z);

    PolynomialSpec bad;
    bad.f1.terms = {{-1, 0, 1.0}};
    CHECK_THROWS_AS(make_polynomial_field(bad), InvalidSpec);
}

TEST_CASE("json field descriptions") {
    const PlanarField rot = make_field(R"({"type": "rotation", "b": 3.0})");
    CHECK(rot.eval({1.0, 0.0}).y == doctest::Approx(3.0));

    const PlanarField mono = make_field(R"({"type": "monomial", "p": 2, "q": 2})");
    CHECK(mono.eval({0.5, 0.5}).y == doctest::Approx(2.0 * std::pow(0.5, 3)));

    const PlanarField qp =
        make_field(R"({"type": "quadratic_product", "forms": [[[1,0],[0,1]], [[2,0],[0,1]]]})");
    CHECK(qp.eval({0.0, 0.0}).x == 0.0);

    const PlanarField tf =
        make_field(R"({"type": "takens_flat", "beta": [1.0], "xbar": {"c": 1.0, "poly": [[1,0,1]]}})");
    CHECK(tf.eval({1.0, 0.0}).y == doctest::Approx(1.0 + std::exp(-1.0)));

    const PlanarField tn = make_field(R"({"type": "takens_nonflat", "delta": 1, "k": 1})");
    CHECK(tn.eval({1.0, 0.0}).x == doctest::Approx(1.0));

    const PlanarField poly =
        make_field(R"({"type": "custom", "f1": [[0,1,-1]], "f2": [[1,0,1]]})");
    CHECK(poly.eval({0.0, 1.0}).x == doctest::Approx(-1.0));

    CHECK_THROWS_AS(make_field("not json"), InvalidSpec);
    CHECK_THROWS_AS(make_field(R"({"b": 1.0})"), InvalidSpec);
    CHECK_THROWS_AS(make_field(R"({"type": "spiral"})"), InvalidSpec);
    CHECK_THROWS_AS(make_field(R"({"type": "rotation"})"), InvalidSpec);
    CHECK_THROWS_AS(make_field(R"({"type": "custom", "f1": [[0,1]], "f2": []})"), InvalidSpec);
}

TEST_CASE("linearize falls back to differences") {
    const PlanarField f = make_custom(
        [](Vec2 z) { return Vec2{std::sin(z.x) + z.y * z.y, z.x * std::exp(z.y)}; });
    const SquareMatrix j = linearize(f);
    CHECK(j(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j(1, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(make_custom(nullptr), InvalidSpec);
}

TEST_CASE("first integrals annihilate their fields") {
    const auto samples = sample_disk(40);
    const std::vector<PlanarField> conservative = {
        make_rotation(1.5),
        make_monomial(2, 2, 1.0),
        make_quadratic_product({SquareMatrix::identity(2), SquareMatrix{{2.0, 0.0}, {0.0, 1.0}}}),
        make_takens_flat(TakensFlatSpec{{1.0, 0.3}, {}, {}}),
    };
    for (const auto& f : conservative) {
        const auto integral = first_integral(f);
        REQUIRE(integral.has_value());
        CHECK(first_integral_residual(f, *integral, samples) <= 1e-10);
    }

    // perturbed or dissipative members carry no closed-form invariant
    TakensFlatSpec pert;
    pert.xbar = FlatPart{1.0, {{1, 0, 1.0}}};
    CHECK_FALSE(first_integral(make_takens_flat(pert)).has_value());
    CHECK_FALSE(first_integral(make_takens_nonflat(1, 1, 0.0)).has_value());
    CHECK_FALSE(first_integral(make_custom([](Vec2 z) { return z; })).has_value());
}

TEST_CASE("hamiltonian construction") {
    ScalarField h;
    h.eval = [](Vec2 z) { return 0.5 * (z.x * z.x + z.y * z.y); };
    h.gradient = [](Vec2 z) { return z; };
    const PlanarField f = hamiltonian_of(h);
    const Vec2 v = f.eval({0.2, 0.7});
    CHECK(v.x == doctest::Approx(-0.7));
    CHECK(v.y == doctest::Approx(0.2));

    ScalarField no_grad;
    no_grad.eval = h.eval;
    CHECK_THROWS_AS(hamiltonian_of(no_grad), MissingGradient);
}

TEST_CASE("pushforward by a linear map") {
    const PlanarField f = make_rotation(1.0);
    const double s = 2.0;
    const PlanarField g = pushforward(
        f, [s](Vec2 z) { return s * z; }, [s](Vec2 z) { return (1.0 / s) * z; },
        [s](Vec2) { return s * SquareMatrix::identity(2); });
    for (const Vec2 z : sample_disk(10)) {
        const Vec2 a = g.eval(z);
        const Vec2 b = f.eval(z);
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
        CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
    }

    // conjugating by a rotation leaves the rotation field fixed
    const double c = std::cos(0.6), sn = std::sin(0.6);
    const PlanarField h = pushforward(
        f, [c, sn](Vec2 z) { return Vec2{c * z.x - sn * z.y, sn * z.x + c * z.y}; },
        [c, sn](Vec2 z) { return Vec2{c * z.x + sn * z.y, -sn * z.x + c * z.y}; },
        [c, sn](Vec2) {
            return SquareMatrix{{c, -sn}, {sn, c}};
        });
    for (const Vec2 z : sample_disk(10, 11)) {
        const Vec2 a = h.eval(z);
        const Vec2 b = f.eval(z);
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
        CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
    }
}

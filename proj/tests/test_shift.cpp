#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "centerkit/errors.hpp"
#include "centerkit/fields.hpp"
#include "centerkit/flow.hpp"
#include "centerkit/linalg.hpp"
#include "centerkit/polar.hpp"
#include "centerkit/shift.hpp"
#include "doctest.h"

using namespace centerkit;

namespace {

const double kTau = 2.0 * M_PI;

std::function<Vec2(Vec2)> rotate_by(std::function<double(Vec2)> angle) {
    return [angle](Vec2 z) {
        const double a = angle(z);
        const double c = std::cos(a), s = std::sin(a);
        return Vec2{c * z.x - s * z.y, s * z.x + c * z.y};
    };
}

std::vector<Vec2> ring_samples(int count, unsigned seed = 5) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> r(0.1, 0.8);
    std::uniform_real_distribution<double> a(0.0, kTau);
    std::vector<Vec2> out;
    for (int i = 0; i < count; ++i) {
        const double rad = r(rng), ang = a(rng);
        out.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    return out;
}

}  // namespace

TEST_CASE("jet estimation at the origin") {
    const auto h = rotate_by([](Vec2) { return 0.7; });
    const SquareMatrix j = map_jet(h);
    CHECK(j(0, 0) == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
    CHECK(j(0, 1) == doctest::Approx(-std::sin(0.7)).epsilon(1e-10));
    CHECK(j(1, 0) == doctest::Approx(std::sin(0.7)).epsilon(1e-10));

    const SquareMatrix s = map_jet([](Vec2 z) { return Vec2{2.0 * z.x + z.y * z.y, 2.0 * z.y}; });
    CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(s(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("multiplicative factorization of near-identity maps") {
    const GammaDecomposition g = gamma_decompose(
        [](Vec2 z) {
            const double a = z.x * z.x + z.y * z.y;
            const double c = std::cos(a), s = std::sin(a);
            return Vec2{c * z.x - s * z.y, s * z.x + c * z.y};
        },
        1.0);
    CHECK(g.tau == 1.0);
    CHECK(g.angle({0.0, 0.0}) == 0.0);
    for (double rho : {0.2, 0.5, 0.9}) {
        const Vec2 z{rho, 0.0};
        CHECK(g.angle(z) == doctest::Approx(rho * rho).epsilon(1e-9));
        CHECK(g.magnitude(z) == doctest::Approx(1.0).epsilon(1e-10));
    }

    const GammaDecomposition sc = gamma_decompose([](Vec2 z) { return 0.5 * z; }, 0.5);
    CHECK(sc.magnitude({0.3, 0.4}) == doctest::Approx(0.5));
    CHECK(sc.angle({0.3, 0.4}) == doctest::Approx(0.0));
    CHECK(sc.magnitude({0.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("argument tracking unwinds past half turns") {
    // angle grows to 6.48 radians at the rim, past what one branch holds
    const GammaDecomposition g = gamma_decompose(
        [](Vec2 z) {
            const double a = 8.0 * (z.x * z.x + z.y * z.y);
            const double c = std::cos(a), s = std::sin(a);
            return Vec2{c * z.x - s * z.y, s * z.x + c * z.y};
        },
        1.0);
    const double got = g.angle({0.9, 0.0});
    CHECK(got == doctest::Approx(8.0 * 0.81).epsilon(1e-8));
    CHECK(got > M_PI);  // a principal-branch reading would fold this down
}

TEST_CASE("maps that vanish inside the disk cannot be factored") {
    auto pinch = [](Vec2 z) {
        const double u = z.x * z.x + z.y * z.y;
        return (1.0 - 2.0 * u) * z;
    };
    const GammaDecomposition g = gamma_decompose(pinch, 1.0);
    CHECK(g.angle({0.5, 0.0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(g.angle({0.8, 0.0}), VanishingImage);

    CHECK_THROWS_AS(gamma_decompose(rotate_by([](Vec2) { return 0.4; }), 1.0), JetNotScalar);
    CHECK_THROWS_AS(gamma_decompose([](Vec2 z) { return z + Vec2{0.2, 0.0}; }, 1.0),
                    NotOriginPreserving);
}

TEST_CASE("time split for rotations") {
    const PlanarField f = make_rotation(1.0);
    const OmegaSplit split = omega_extract(rotate_by([](Vec2) { return 0.7; }), f);
    CHECK(split.omega == doctest::Approx(0.7).epsilon(1e-6));
    for (const Vec2 z : ring_samples(6)) {
        CHECK(norm(split.h1(z) - z) <= 1e-8);
    }
}

TEST_CASE("time split for the nilpotent shear family") {
    PolynomialSpec spec;
    spec.f1.terms = {{0, 1, 1.0}};
    const PlanarField f = make_polynomial_field(spec);
    const auto h = [](Vec2 z) { return Vec2{z.x + 0.4 * z.y, z.y}; };
    const OmegaSplit split = omega_extract(h, f);
    CHECK(split.omega == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(norm(split.h1({0.3, 0.2}) - Vec2{0.3, 0.2}) <= 1e-8);
}

TEST_CASE("orientation-reversing jets are rejected") {
    const PlanarField f = make_rotation(1.0);
    CHECK_THROWS_AS(omega_extract([](Vec2 z) { return Vec2{z.x, -z.y}; }, f),
                    OrientationReversing);

    PolynomialSpec spec;
    spec.f1.terms = {{0, 1, 1.0}};
    const PlanarField shear = make_polynomial_field(spec);
    const SquareMatrix m = jacobi_family_matrix(JacobiFamily::unipotent_minus, 0.4, 1.0);
    CHECK_THROWS_AS(omega_extract(
                        [m](Vec2 z) {
                            return Vec2{m(0, 0) * z.x + m(0, 1) * z.y,
                                        m(1, 0) * z.x + m(1, 1) * z.y};
                        },
                        shear),
                    OrientationReversing);

    CHECK_THROWS_AS(omega_extract([](Vec2 z) { return z; }, make_monomial(2, 2, 1.0)),
                    NotInFamily);
}

TEST_CASE("angular travel time around a full turn") {
    auto zero = [](double, double) { return 0.0; };
    CHECK(period_integral(zero, 0.5) == doctest::Approx(kTau).epsilon(1e-12));

    auto radial = [](double, double rho) { return 0.3 * rho * rho; };
    CHECK(period_integral(radial, 0.4) ==
          doctest::Approx(kTau / (1.0 + 0.3 * 0.16)).epsilon(1e-10));

    // closed form for a first-harmonic perturbation
    auto wavy = [](double phi, double) { return 0.5 * std::sin(phi); };
    CHECK(period_integral(wavy, 0.2) == doctest::Approx(kTau / std::sqrt(0.75)).epsilon(1e-10));

    // the travel time always sits between the extreme angular rates
    for (double rho : {0.1, 0.5, 0.9}) {
        const double theta = period_integral(wavy, rho, 1.3);
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 512; ++i) {
            const double rate = 1.0 + wavy(kTau * i / 512.0, rho);
            lo = std::min(lo, 1.0 / rate);
            hi = std::max(hi, 1.0 / rate);
        }
        CHECK(theta >= kTau * lo * (1.0 - 1e-9));
        CHECK(theta <= kTau * hi * (1.0 + 1e-9));
    }

    auto stalled = [](double, double) { return -1.0; };
    CHECK_THROWS_AS(period_integral(stalled, 0.5), SingularIntegrand);
}

TEST_CASE("travel time to a lifted image") {
    // field (1 + 0.3 rho^2) d_phi, time-c map in the lift
    const double c = 0.8;
    LiftedMap lm;
    lm.phi_map = [c](double phi, double rho) { return phi + c * (1.0 + 0.3 * rho * rho); };
    lm.rho_map = [](double, double rho) { return rho; };
    auto phibar = [](double, double rho) { return 0.3 * rho * rho; };
    for (double rho : {0.2, 0.6}) {
        for (double phi : {0.0, 2.0}) {
            CHECK(sigma_from_lift(phibar, lm, phi, rho) == doctest::Approx(c).epsilon(1e-10));
        }
    }

    LiftedMap back;
    back.phi_map = [c](double phi, double rho) { return phi - c * (1.0 + 0.3 * rho * rho); };
    back.rho_map = lm.rho_map;
    CHECK(sigma_from_lift(phibar, back, 0.5, 0.2) == doctest::Approx(-c).epsilon(1e-10));
}

TEST_CASE("shift recovery for a constant time function") {
    const PlanarField f = make_rotation(1.0);
    auto samples = ring_samples(8);
    samples.insert(samples.begin(), {0.0, 0.0});
    const ShiftGrid grid = recover_shift(f, rotate_by([](Vec2) { return 0.3; }), samples);
    REQUIRE(grid.sigma.size() == samples.size());
    for (double s : grid.sigma) CHECK(s == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(grid.max_residual <= 1e-8);
}

TEST_CASE("shift recovery for a varying time function") {
    const PlanarField f = make_rotation(1.0);
    auto alpha = [](Vec2 z) { return 0.3 + 0.2 * z.x; };
    auto samples = ring_samples(10, 9);
    samples.insert(samples.begin(), {0.0, 0.0});
    const ShiftGrid grid = recover_shift(f, rotate_by(alpha), samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(std::abs(grid.sigma[i] - alpha(samples[i])) <= 1e-6);
    }
    CHECK(grid.max_residual <= 1e-6);
}

TEST_CASE("shift recovery over a flat center") {
    TakensFlatSpec spec;
    spec.beta = {1.0, 0.3};
    const PlanarField f = make_takens_flat(spec);
    auto alpha = [](Vec2 z) { return 0.5 + 0.2 * z.y; };
    auto h = [&f, alpha](Vec2 z) { return flow(f, z, alpha(z)); };
    auto samples = ring_samples(6, 13);
    samples.insert(samples.begin(), {0.0, 0.0});
    const ShiftGrid grid = recover_shift(f, h, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(std::abs(grid.sigma[i] - alpha(samples[i])) <= 1e-6);
    }
    CHECK(grid.max_residual <= 1e-6);
}

TEST_CASE("shift recovery lands on the principal branch") {
    // a full-period time function shifts every point to itself
    const PlanarField f = make_rotation(1.0);
    const auto samples = ring_samples(5, 21);
    const ShiftGrid grid = recover_shift(f, [](Vec2 z) { return z; }, samples);
    for (double s : grid.sigma) CHECK(std::abs(s) <= 1e-8);
}

TEST_CASE("shift recovery rejects maps that leave orbits") {
    const PlanarField f = make_rotation(1.0);
    const auto samples = ring_samples(4);
    CHECK_THROWS_AS(recover_shift(f, [](Vec2 z) { return 0.5 * z; }, samples),
                    NotOrbitPreserving);
}

TEST_CASE("shift recovery requires an extendable period function") {
    const PlanarField f = make_monomial(2, 2, 1.0);
    const auto samples = ring_samples(3);
    CHECK_THROWS_AS(recover_shift(f, [](Vec2 z) { return z; }, samples), NotPTC);
}

TEST_CASE("criticality margin for time functions") {
    const PlanarField f = make_rotation(1.0);
    const auto samples = ring_samples(12, 31);

    ScalarField mild;
    mild.eval = [](Vec2 z) { return 0.3 + 0.2 * z.x; };
    mild.gradient = [](Vec2) { return Vec2{0.2, 0.0}; };
    CHECK(gamma_set_membership(f, mild, samples));

    ScalarField steep;
    steep.eval = [](Vec2 z) { return 1.5 * z.x; };
    steep.gradient = [](Vec2) { return Vec2{1.5, 0.0}; };
    std::vector<Vec2> probe{{0.0, 0.8}};
    CHECK_FALSE(gamma_set_membership(f, steep, probe));

    // finite differences agree with the supplied gradient
    ScalarField steep_fd;
    steep_fd.eval = steep.eval;
    CHECK_FALSE(gamma_set_membership(f, steep_fd, probe));
    ScalarField mild_fd;
    mild_fd.eval = mild.eval;
    CHECK(gamma_set_membership(f, mild_fd, samples));
}

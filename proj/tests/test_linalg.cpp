#include <cmath>
#include <random>
#include <vector>

#include "centerkit/errors.hpp"
#include "centerkit/linalg.hpp"
#include "centerkit/matrix.hpp"
#include "doctest.h"

using namespace centerkit;

namespace {

double residual(const SquareMatrix& m) { return m.max_abs(); }

SquareMatrix conjugate(const SquareMatrix& h, const SquareMatrix& a) {
    return h * a * inverse(h);
}

RationalMatrix rconjugate(const RationalMatrix& h, const RationalMatrix& a) {
    return h * a * inverse(h);
}

}  // namespace

TEST_CASE("spectrum of small matrices") {
    const auto rot = spectrum(SquareMatrix{{0.0, -1.0}, {1.0, 0.0}});
    CHECK(rot.size() == 2);
    CHECK(rot[0].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rot[0].imag() == doctest::Approx(-1.0));
    CHECK(rot[1].imag() == doctest::Approx(1.0));

    const auto diag = spectrum(SquareMatrix{{2.0, 0.0}, {0.0, 3.0}});
    CHECK(diag[0].real() == doctest::Approx(2.0));
    CHECK(diag[1].real() == doctest::Approx(3.0));

    const auto tri = spectrum(SquareMatrix{{1.0, 5.0, 0.0}, {0.0, 2.0, 1.0}, {0.0, 0.0, 4.0}});
    CHECK(tri.size() == 3);
    CHECK(tri[0].real() == doctest::Approx(1.0));
    CHECK(tri[1].real() == doctest::Approx(2.0));
    CHECK(tri[2].real() == doctest::Approx(4.0));
}

TEST_CASE("rank thresholds") {
    CHECK(rank_of(SquareMatrix{{1.0, 0.0}, {0.0, 1.0}}) == 2);
    CHECK(rank_of(SquareMatrix{{1.0, 2.0}, {2.0, 4.0}}) == 1);
    CHECK(rank_of(SquareMatrix::zero(3)) == 0);
    CHECK(rank_of(SquareMatrix{{1.0, 0.0}, {0.0, 1e-15}}) == 1);
}

TEST_CASE("proportional pair with sign flip") {
    const SquareMatrix a{{0.0, 1.0}, {1.0, 0.0}};
    const SquareMatrix h{{1.0, 0.0}, {0.0, -1.0}};
    const SquareMatrix b = conjugate(h, a);

    const auto rep = collinear_classify(a, b, h);
    CHECK(rep.kind == CollinearCase::proportional);
    REQUIRE(rep.tau.has_value());
    CHECK(*rep.tau == doctest::Approx(-1.0));
    CHECK(residual(b - *rep.tau * a) <= 1e-12);
    CHECK(residual(h * a - *rep.tau * (a * h)) <= 1e-12);
    CHECK(residual(rep.commuter * a - *rep.tau * (a * rep.commuter)) <= 1e-12);
}

TEST_CASE("proportional pair from a commuting conjugator") {
    const SquareMatrix a{{1.0, 2.0}, {3.0, 4.0}};
    const SquareMatrix h = SquareMatrix::identity(2) + 0.5 * a;
    const SquareMatrix b = conjugate(h, a);

    const auto rep = collinear_classify(a, b, h);
    CHECK(rep.kind == CollinearCase::proportional);
    CHECK(*rep.tau == doctest::Approx(1.0));
    CHECK(residual(h * a - a * h) <= 1e-12);
}

TEST_CASE("rank-one pair with nonzero trace") {
    const SquareMatrix a{{2.0, 0.0}, {0.0, 0.0}};
    const SquareMatrix h{{1.0, -1.5}, {0.0, 1.0}};
    const SquareMatrix b = conjugate(h, a);
    CHECK(residual(b - SquareMatrix{{2.0, 3.0}, {0.0, 0.0}}) <= 1e-12);

    const auto rep = collinear_classify(a, b, h);
    CHECK(rep.kind == CollinearCase::rank_one_semisimple);
    REQUIRE(rep.structure.has_value());
    const SquareMatrix& g = *rep.structure;
    CHECK(residual(g * b - b) <= 1e-9);
    CHECK(residual(a * g - b) <= 1e-9);
    CHECK(residual(rep.commuter * a - a * rep.commuter) <= 1e-9);
}

TEST_CASE("rank-one nilpotent pair") {
    const SquareMatrix a{{0.0, 1.0}, {0.0, 0.0}};
    const SquareMatrix h{{2.0, 0.0}, {0.0, 1.0}};
    const SquareMatrix b = conjugate(h, a);
    CHECK(residual(b - SquareMatrix{{0.0, 2.0}, {0.0, 0.0}}) <= 1e-12);

    const auto rep = collinear_classify(a, b, h);
    CHECK(rep.kind == CollinearCase::rank_one_nilpotent);
    const SquareMatrix& g = *rep.structure;
    CHECK(residual(g * b - b) <= 1e-9);
    CHECK(residual(a * g - b) <= 1e-9);
    CHECK(residual(rep.commuter * a - a * rep.commuter) <= 1e-9);
}

TEST_CASE("non-collinear conjugates are rejected") {
    const SquareMatrix a{{0.0, -1.0}, {1.0, 0.0}};
    const SquareMatrix h{{1.0, 1.0}, {0.0, 1.0}};
    const SquareMatrix b = conjugate(h, a);
    CHECK_THROWS_AS(collinear_classify(a, b, h), NotCollinear);
}

TEST_CASE("conjugacy violations are rejected") {
    const SquareMatrix a = SquareMatrix::identity(2);
    const SquareMatrix b = 2.0 * SquareMatrix::identity(2);
    CHECK_THROWS_AS(collinear_classify(a, b, SquareMatrix::identity(2)), NotConjugate);
    CHECK_THROWS_AS(collinear_classify(SquareMatrix::zero(2), SquareMatrix::zero(2),
                                       SquareMatrix::identity(2)),
                    ZeroMap);
    const SquareMatrix singular{{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(collinear_classify(a, a, singular), NotConjugate);
}

TEST_CASE("exact classification over the rationals") {
    const RationalMatrix a{{Rational(2), Rational(0)}, {Rational(0), Rational(0)}};
    const RationalMatrix h{{Rational(1), Rational(-3, 2)}, {Rational(0), Rational(1)}};
    const RationalMatrix b = rconjugate(h, a);

    const auto rep = collinear_classify_exact(a, b, h);
    CHECK(rep.kind == CollinearCase::rank_one_semisimple);
    const RationalMatrix& g = *rep.structure;
    CHECK((g * b - b).max_abs() == 0);
    CHECK((a * g - b).max_abs() == 0);
    CHECK((rep.commuter * a - a * rep.commuter).max_abs() == 0);

    const RationalMatrix an{{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
    const RationalMatrix hn{{Rational(2), Rational(0)}, {Rational(0), Rational(1)}};
    const RationalMatrix bn = rconjugate(hn, an);
    const auto repn = collinear_classify_exact(an, bn, hn);
    CHECK(repn.kind == CollinearCase::rank_one_nilpotent);
    CHECK((*repn.structure * bn - bn).max_abs() == 0);
    CHECK((an * *repn.structure - bn).max_abs() == 0);

    const RationalMatrix ap{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
    const RationalMatrix hp{{Rational(1), Rational(0)}, {Rational(0), Rational(-1)}};
    const auto repp = collinear_classify_exact(ap, rconjugate(hp, ap), hp);
    CHECK(repp.kind == CollinearCase::proportional);
    CHECK(*repp.tau == Rational(-1));
}

TEST_CASE("seeded random proportional pairs in dimension three") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        SquareMatrix a(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = coeff(rng);
        if (rank_of(a) < 2) continue;
        SquareMatrix h = SquareMatrix::identity(3) + coeff(rng) * a + coeff(rng) * (a * a);
        if (std::abs(determinant(h)) < 0.05) continue;
        const SquareMatrix b = conjugate(h, a);
        const auto rep = collinear_classify(a, b, h, 1e-7);
        CHECK(rep.kind == CollinearCase::proportional);
        CHECK(*rep.tau == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("probe vector avoids both kernels") {
    const SquareMatrix a{{0.0, 1.0}, {0.0, 0.0}};
    const SquareMatrix b{{0.0, 2.0}, {0.0, 0.0}};
    const auto x = find_nonkernel_vector(a, b);
    const auto ax = a.apply(x);
    const auto bx = b.apply(x);
    CHECK(std::hypot(ax[0], ax[1]) > 0.5);
    CHECK(std::hypot(bx[0], bx[1]) > 0.5);
    CHECK_THROWS_AS(find_nonkernel_vector(SquareMatrix::zero(2), b), ZeroMap);
}

TEST_CASE("family matrices round trip through classification") {
    const SquareMatrix rot_a{{0.0, 1.0}, {-1.0, 0.0}};
    const SquareMatrix nil_a{{0.0, 1.0}, {0.0, 0.0}};
    const std::vector<JacobiFamily> rot_families{JacobiFamily::rotation,
                                                 JacobiFamily::reflection};
    const std::vector<JacobiFamily> nil_families{
        JacobiFamily::unipotent_plus, JacobiFamily::unipotent_minus,
        JacobiFamily::mixed_plus_minus, JacobiFamily::mixed_minus_plus};

    for (double omega = -1.5; omega <= 1.5; omega += 0.25) {
        for (auto fam : rot_families) {
            const SquareMatrix m = jacobi_family_matrix(fam, omega, 1.0);
            const JacobiClass jc = jacobi_classify(m, rot_a);
            CHECK(jc.family == fam);
            CHECK(residual(jacobi_family_matrix(jc.family, jc.omega, 1.0) - m) <= 1e-12);
            const auto eig = spectrum(m);
            CHECK(std::abs(eig[0]) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(std::abs(eig[1]) == doctest::Approx(1.0).epsilon(1e-9));
        }
        for (auto fam : nil_families) {
            const SquareMatrix m = jacobi_family_matrix(fam, omega, 1.0);
            const JacobiClass jc = jacobi_classify(m, nil_a);
            CHECK(jc.family == fam);
            CHECK(jc.omega == doctest::Approx(omega).epsilon(1e-12));
            const auto eig = spectrum(m);
            CHECK(std::abs(eig[0]) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("rotation omega uses the principal branch") {
    const SquareMatrix rot_a{{0.0, 2.0}, {-2.0, 0.0}};
    const SquareMatrix m = jacobi_family_matrix(JacobiFamily::rotation, 0.4, 2.0);
    const JacobiClass jc = jacobi_classify(m, rot_a);
    CHECK(jc.family == JacobiFamily::rotation);
    CHECK(jc.omega == doctest::Approx(0.4));

    const SquareMatrix wrapped = jacobi_family_matrix(JacobiFamily::rotation, 0.4 + M_PI, 2.0);
    const JacobiClass jw = jacobi_classify(wrapped, rot_a);
    CHECK(residual(jacobi_family_matrix(jw.family, jw.omega, 2.0) - wrapped) <= 1e-12);
}

TEST_CASE("lower-triangular nilpotent linear parts are handled") {
    const SquareMatrix nil_low{{0.0, 0.0}, {3.0, 0.0}};
    const SquareMatrix h{{1.0, 0.0}, {3.0 * 0.7, 1.0}};
    const JacobiClass jc = jacobi_classify(h, nil_low);
    CHECK(jc.family == JacobiFamily::unipotent_plus);
    CHECK(jc.omega == doctest::Approx(0.7));
}

TEST_CASE("matrices outside every family are rejected") {
    const SquareMatrix rot_a{{0.0, 1.0}, {-1.0, 0.0}};
    CHECK_THROWS_AS(jacobi_classify(SquareMatrix{{2.0, 0.0}, {0.0, 1.0}}, rot_a), NotInFamily);
    const SquareMatrix bad_a{{1.0, 0.0}, {0.0, 2.0}};
    CHECK_THROWS_AS(jacobi_classify(SquareMatrix::identity(2), bad_a), InvalidSpec);
}

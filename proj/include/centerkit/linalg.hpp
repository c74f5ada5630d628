#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "centerkit/matrix.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = BasicMatrix<Rational>;

/* Eigenvalues with multiplicity, sorted by (real, imag).  n=2 uses the
   closed-form characteristic polynomial; n=3,4 a dense eigensolver. */
std::vector<std::complex<double>> spectrum(const SquareMatrix& a);

/* Numerical rank via singular values, threshold tol * max-norm. */
int rank_of(const SquareMatrix& a, double tol = default_tol());

/* Trichotomy for a conjugate pair B = H A H^{-1} whose values stay
   pointwise collinear with those of A. */
enum class CollinearCase {
    proportional,         // rank A >= 2: B = tau * A
    rank_one_semisimple,  // rank 1, nonzero trace
    rank_one_nilpotent,   // rank 1, zero spectrum
};

std::string to_string(CollinearCase c);

template <typename Scalar>
struct BasicCollinearityReport {
    CollinearCase kind{};
    /* proportional case only */
    std::optional<Scalar> tau;
    /* rank-one cases: adapted basis (columns) in which A has a single
       nonzero entry, and the intertwiner G with G*B = A*G = B. */
    std::optional<BasicMatrix<Scalar>> basis;
    std::optional<BasicMatrix<Scalar>> structure;
    /* Matrix commuting with A: G*H in the rank-one cases, H itself in
       the proportional case (where H A = tau A H instead). */
    BasicMatrix<Scalar> commuter = BasicMatrix<Scalar>::identity(2);
};

using CollinearityReport = BasicCollinearityReport<double>;
using RationalCollinearityReport = BasicCollinearityReport<Rational>;

CollinearityReport collinear_classify(const SquareMatrix& a, const SquareMatrix& b,
                                      const SquareMatrix& h, double tol = default_tol());

/* Exact arithmetic over the rationals; same contract, no tolerances. */
RationalCollinearityReport collinear_classify_exact(const RationalMatrix& a,
                                                    const RationalMatrix& b,
                                                    const RationalMatrix& h);

/* A probe vector x with A(x) != 0 and B(x) != 0, searched over the
   standard basis and pairwise sums. */
std::vector<double> find_nonkernel_vector(const SquareMatrix& a, const SquareMatrix& b,
                                          double tol = default_tol());

/* The six 2x2 shapes a linearized orbit-preserving map can take at the
   singular point, each carrying one flow-time parameter omega. */
enum class JacobiFamily {
    rotation,
    reflection,
    unipotent_plus,
    unipotent_minus,
    mixed_plus_minus,
    mixed_minus_plus,
};

std::string to_string(JacobiFamily f);

struct JacobiClass {
    JacobiFamily family{};
    double omega = 0.0;
};

/* Model matrix for a family at parameter omega, relative to the linear
   part [[0,b],[-b,0]] (rotation/reflection) or [[0,b],[0,0]] (rest). */
SquareMatrix jacobi_family_matrix(JacobiFamily family, double omega, double b);

/* Matches H against the six families for the given linear part A, which
   must be rotation-type [[0,b],[-b,0]] or nilpotent with a single
   off-diagonal entry.  omega uses the principal branch for the
   rotation-type families. */
JacobiClass jacobi_classify(const SquareMatrix& h, const SquareMatrix& a,
                            double tol = default_tol());

}  // namespace centerkit

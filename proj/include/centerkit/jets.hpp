#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "centerkit/fields.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

using Rational = boost::multiprecision::cpp_rational;

/* Homogeneous polynomial in x, y with exact rational coefficients;
   coefficient i multiplies x^i y^{degree-i}. */
class HomogeneousPoly {
public:
    explicit HomogeneousPoly(int degree) : degree_(degree), c_(degree + 1) {}
    HomogeneousPoly(int degree, std::vector<Rational> coeffs);

    int degree() const { return degree_; }
    const Rational& coeff(int i) const { return c_.at(i); }
    Rational& coeff(int i) { return c_.at(i); }
    bool is_zero() const;

    HomogeneousPoly d_x() const;
    HomogeneousPoly d_y() const;
    HomogeneousPoly mul_x() const;
    HomogeneousPoly mul_y() const;

    friend HomogeneousPoly operator+(const HomogeneousPoly& a, const HomogeneousPoly& b);
    friend HomogeneousPoly operator-(const HomogeneousPoly& a, const HomogeneousPoly& b);
    friend HomogeneousPoly operator*(const Rational& s, const HomogeneousPoly& p);
    friend bool operator==(const HomogeneousPoly& a, const HomogeneousPoly& b);

private:
    int degree_;
    std::vector<Rational> c_;
};

struct TaylorTable {
    int max_degree = 0;
    std::vector<HomogeneousPoly> polys;  // one per degree 0..max_degree
};

/* Parses {"max_degree": n, "terms": [[i, j, "p/q"], ...]}. */
TaylorTable parse_taylor_table(const std::string& json_text);

/* x p'_y - y p'_x; zero exactly on radial polynomials. */
HomogeneousPoly radial_relation_defect(const HomogeneousPoly& p);

/* q with p = (x^2+y^2) q, via the p'_x / (n x) coefficient transport. */
HomogeneousPoly divide_by_r2(const HomogeneousPoly& p);

struct RadialForm {
    Rational a;
    int k = 0;  // p = a (x^2+y^2)^k
};

/* Present iff p is radial; the zero polynomial yields (0, 0). */
std::optional<RadialForm> radial_form(const HomogeneousPoly& p);

struct RadializeOutcome {
    bool radial = false;
    std::vector<Rational> coefficients;  // a_i with p_{2i} = a_i (x^2+y^2)^i; trailing zeros trimmed
    int failing_degree = -1;
    std::optional<HomogeneousPoly> failing_defect;
};

/* Checks that the whole table is a series in x^2+y^2; otherwise reports
   the smallest failing degree with its defect polynomial. */
RadializeOutcome radialize_series(const TaylorTable& table);

/* Kernel dimension of radial_relation_defect on degree-n polynomials,
   by exact elimination: 1 for even n, 0 for odd n. */
int defect_kernel_dimension(int n);

/* max over samples of |f'_y (x + xbar) - f'_x (y + ybar)| for a field in
   flat normal form; zero when grad f is proportional to (x+xbar, y+ybar). */
double rigidity_residual(const ScalarField& f, const PlanarField& field,
                         const std::vector<Vec2>& samples);

std::string to_rational_string(const Rational& r);

}  // namespace centerkit

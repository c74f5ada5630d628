#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "centerkit/matrix.hpp"
#include "centerkit/types.hpp"

namespace centerkit {

struct ScalarField {
    std::function<double(Vec2)> eval;
    std::function<Vec2(Vec2)> gradient;  // may be empty
};

/* c * exp(-1/(x^2+y^2)) * sum coeff * x^i y^j, value 0 at the origin.
   The standard analytically-flat family used for flat perturbations. */
struct FlatPart {
    double c = 0.0;
    std::vector<std::tuple<int, int, double>> poly;  // (i, j, coeff)

    bool zero() const { return c == 0.0 || poly.empty(); }
    double eval(Vec2 z) const;
    Vec2 gradient(Vec2 z) const;
};

/* Polynomial in x, y as a term list. */
struct PolyXY {
    std::vector<std::tuple<int, int, double>> terms;

    double eval(Vec2 z) const;
    Vec2 gradient(Vec2 z) const;
};

struct RotationSpec {
    double b = 1.0;  // field (-b y, b x)
};

struct MonomialSpec {
    int p = 1, q = 1;
    double b = 1.0;  // Hamiltonian (b/2)(x^{2p} + y^{2q})
};

struct QuadraticProductSpec {
    std::vector<SquareMatrix> forms;  // symmetric positive-definite 2x2
};

struct TakensFlatSpec {
    std::vector<double> beta{1.0};  // profile of r^2; beta[0] != 0
    FlatPart xbar, ybar;
};

struct TakensNonflatSpec {
    int delta = 1;  // +1 or -1
    int k = 1;
    double alpha = 0.0;
};

struct PolynomialSpec {
    PolyXY f1, f2;  // the two field components
};

using FieldMeta = std::variant<RotationSpec, MonomialSpec, QuadraticProductSpec, TakensFlatSpec,
                               TakensNonflatSpec, PolynomialSpec>;

struct PlanarField {
    std::function<Vec2(Vec2)> eval;
    std::function<SquareMatrix(Vec2)> jacobian;  // may be empty
    std::shared_ptr<const FieldMeta> meta;       // null for ad-hoc fields
    bool claims_boundary_tangency = false;
};

PlanarField make_rotation(double b);
PlanarField make_monomial(int p, int q, double b);
PlanarField make_quadratic_product(std::vector<SquareMatrix> forms);
PlanarField make_takens_flat(TakensFlatSpec spec);
PlanarField make_takens_nonflat(int delta, int k, double alpha);
PlanarField make_polynomial_field(PolynomialSpec spec);

/* Ad-hoc field from raw evaluators; carries no symbolic data. */
PlanarField make_custom(std::function<Vec2(Vec2)> eval,
                        std::function<SquareMatrix(Vec2)> jacobian = nullptr);

/* Parses the JSON field description {"type": ..., parameters...}. */
PlanarField make_field(const std::string& json_text);

/* Jacobian at the origin: analytic when available, otherwise central
   differences with one Richardson level (steps h, h/2). */
SquareMatrix linearize(const PlanarField& f, double h = 1e-4);

/* F = (-f_y, f_x). */
PlanarField hamiltonian_of(const ScalarField& f);

PlanarField pushforward(const PlanarField& f, std::function<Vec2(Vec2)> g,
                        std::function<Vec2(Vec2)> g_inv,
                        std::function<SquareMatrix(Vec2)> jacobian_g);

/* Known strong first integral for the Hamiltonian constructors. */
std::optional<ScalarField> first_integral(const PlanarField& f);

/* max over samples of the Lie derivative |F . grad f|. */
double first_integral_residual(const PlanarField& f, const ScalarField& integral,
                               const std::vector<Vec2>& samples);

}  // namespace centerkit

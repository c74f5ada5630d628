#include "centerkit/jets.hpp"

#include <cmath>
#include <regex>
#include <stdexcept>
#include <utility>

#include "centerkit/errors.hpp"
#include "json.hpp"

namespace centerkit {

namespace {

HomogeneousPoly zero_poly(int degree) { return HomogeneousPoly(degree); }

HomogeneousPoly times_r2(const HomogeneousPoly& q) {
    const HomogeneousPoly xq = q.mul_x();
    const HomogeneousPoly yq = q.mul_y();
    return xq.mul_x() + yq.mul_y();
}

Rational parse_rational(const nlohmann::json& v) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (!v.is_string()) throw InvalidSpec("rational coefficients must be strings or integers");
    const std::string s = v.get<std::string>();
    static const std::regex pattern(R"(^[+-]?\d+(/\d+)?$)");
    if (!std::regex_match(s, pattern)) throw InvalidSpec("malformed rational: " + s);
    try {
        Rational r(s);
        return r;
    } catch (const std::exception&) {
        throw InvalidSpec("malformed rational: " + s);
    }
}

}  // namespace

HomogeneousPoly::HomogeneousPoly(int degree, std::vector<Rational> coeffs)
    : degree_(degree), c_(std::move(coeffs)) {
    if (degree < 0) throw std::invalid_argument("negative degree");
    if (c_.size() != static_cast<std::size_t>(degree) + 1)
        throw std::invalid_argument("coefficient count does not match degree");
}

bool HomogeneousPoly::is_zero() const {
    for (const auto& v : c_)
        if (v != 0) return false;
    return true;
}

HomogeneousPoly HomogeneousPoly::d_x() const {
    if (degree_ == 0) return zero_poly(0);
    HomogeneousPoly q(degree_ - 1);
    for (int j = 0; j < degree_; ++j) q.coeff(j) = Rational(j + 1) * c_[j + 1];
    return q;
}

HomogeneousPoly HomogeneousPoly::d_y() const {
    if (degree_ == 0) return zero_poly(0);
    HomogeneousPoly q(degree_ - 1);
    for (int i = 0; i < degree_; ++i) q.coeff(i) = Rational(degree_ - i) * c_[i];
    return q;
}

HomogeneousPoly HomogeneousPoly::mul_x() const {
    HomogeneousPoly q(degree_ + 1);
    for (int i = 0; i <= degree_; ++i) q.coeff(i + 1) = c_[i];
    return q;
}

HomogeneousPoly HomogeneousPoly::mul_y() const {
    HomogeneousPoly q(degree_ + 1);
    for (int i = 0; i <= degree_; ++i) q.coeff(i) = c_[i];
    return q;
}

HomogeneousPoly operator+(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    if (a.degree_ != b.degree_) throw std::invalid_argument("degree mismatch");
    HomogeneousPoly q(a.degree_);
    for (int i = 0; i <= a.degree_; ++i) q.c_[i] = a.c_[i] + b.c_[i];
    return q;
}

HomogeneousPoly operator-(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    if (a.degree_ != b.degree_) throw std::invalid_argument("degree mismatch");
    HomogeneousPoly q(a.degree_);
    for (int i = 0; i <= a.degree_; ++i) q.c_[i] = a.c_[i] - b.c_[i];
    return q;
}

HomogeneousPoly operator*(const Rational& s, const HomogeneousPoly& p) {
    HomogeneousPoly q(p.degree_);
    for (int i = 0; i <= p.degree_; ++i) q.c_[i] = s * p.c_[i];
    return q;
}

bool operator==(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    return a.degree_ == b.degree_ && a.c_ == b.c_;
}

TaylorTable parse_taylor_table(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpec(std::string("bad taylor table JSON: ") + e.what());
    }
    try {
        if (!j.contains("max_degree") || !j["max_degree"].is_number_integer())
            throw InvalidSpec("taylor table needs an integer max_degree");
        const int n = j["max_degree"].get<int>();
        if (n < 0 || n > 64) throw InvalidSpec("max_degree out of range");

        TaylorTable table;
        table.max_degree = n;
        for (int d = 0; d <= n; ++d) table.polys.push_back(zero_poly(d));

        for (const auto& term : j.value("terms", nlohmann::json::array())) {
            if (!term.is_array() || term.size() != 3)
                throw InvalidSpec("each term must be [i, j, coefficient]");
            const int i = term[0].get<int>();
            const int k = term[1].get<int>();
            if (i < 0 || k < 0 || i + k > n) throw InvalidSpec("term exponents out of range");
            table.polys[i + k].coeff(i) += parse_rational(term[2]);
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpec(std::string("bad taylor table JSON: ") + e.what());
    }
}

HomogeneousPoly radial_relation_defect(const HomogeneousPoly& p) {
    if (p.degree() == 0) return zero_poly(0);
    return p.d_y().mul_x() - p.d_x().mul_y();
}

HomogeneousPoly divide_by_r2(const HomogeneousPoly& p) {
    const int n = p.degree();
    if (n < 1 || n % 2 != 0) throw NotDivisible("degree must be a positive even number");
    if (!radial_relation_defect(p).is_zero())
        throw NotDivisible("polynomial is not radially symmetric");

    HomogeneousPoly q(n - 2);
    for (int j = 0; j + 2 <= n; ++j) q.coeff(j) = Rational(j + 2) * p.coeff(j + 2) / n;
    if (!(times_r2(q) == p)) throw NotDivisible("coefficient transport failed");
    return q;
}

std::optional<RadialForm> radial_form(const HomogeneousPoly& p) {
    if (p.is_zero()) return RadialForm{Rational(0), 0};
    if (p.degree() % 2 != 0) return std::nullopt;
    if (!radial_relation_defect(p).is_zero()) return std::nullopt;

    HomogeneousPoly cur = p;
    int k = 0;
    while (cur.degree() > 0) {
        cur = divide_by_r2(cur);
        ++k;
    }
    return RadialForm{cur.coeff(0), k};
}

RadializeOutcome radialize_series(const TaylorTable& table) {
    RadializeOutcome out;
    std::vector<Rational> a;
    for (int d = 0; d <= table.max_degree; ++d) {
        const HomogeneousPoly& p = table.polys[d];
        if (p.is_zero()) {
            if (d % 2 == 0) a.push_back(Rational(0));
            continue;
        }
        const auto rf = radial_form(p);
        if (!rf) {
            out.failing_degree = d;
            out.failing_defect = radial_relation_defect(p);
            return out;
        }
        a.push_back(rf->a);
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    out.radial = true;
    out.coefficients = std::move(a);
    return out;
}

int defect_kernel_dimension(int n) {
    if (n < 0) throw std::invalid_argument("negative degree");
    const int dim = n + 1;
    /* Column i is the image of x^i y^{n-i}: (n-i) e_{i+1} - i e_{i-1}. */
    std::vector<std::vector<Rational>> m(dim, std::vector<Rational>(dim));
    for (int i = 0; i < dim; ++i) {
        if (i + 1 < dim) m[i + 1][i] = Rational(n - i);
        if (i - 1 >= 0) m[i - 1][i] = Rational(-i);
    }

    int rank = 0;
    for (int col = 0; col < dim && rank < dim; ++col) {
        int pivot = -1;
        for (int row = rank; row < dim; ++row)
            if (m[row][col] != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        for (int row = rank + 1; row < dim; ++row) {
            if (m[row][col] == 0) continue;
            const Rational factor = m[row][col] / m[rank][col];
            for (int c = col; c < dim; ++c) m[row][c] -= factor * m[rank][c];
        }
        ++rank;
    }
    return dim - rank;
}

double rigidity_residual(const ScalarField& f, const PlanarField& field,
                         const std::vector<Vec2>& samples) {
    if (!f.gradient) throw MissingGradient("rigidity check needs the gradient of f");
    if (!field.meta || !std::holds_alternative<TakensFlatSpec>(*field.meta))
        throw std::invalid_argument("rigidity check needs a field in flat normal form");
    const auto& spec = std::get<TakensFlatSpec>(*field.meta);

    double worst = 0.0;
    for (const Vec2& z : samples) {
        const double u = z.x + spec.xbar.eval(z);
        const double v = z.y + spec.ybar.eval(z);
        if (norm(z) > 0.0 && std::abs(u) < 1e-12 && std::abs(v) < 1e-12)
            throw DegeneratePoint("both shifted coordinates vanish away from the origin");
        const Vec2 g = f.gradient(z);
        worst = std::max(worst, std::abs(g.y * u - g.x * v));
    }
    return worst;
}

std::string to_rational_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace centerkit

#include "centerkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <Eigen/Dense>

#include "centerkit/errors.hpp"

namespace centerkit {

double default_tol() {
    static const double tol = [] {
        const char* s = std::getenv("CENTERKIT_TOL");
        if (s && *s) {
            char* end = nullptr;
            double v = std::strtod(s, &end);
            if (end != s && *end == '\0' && std::isfinite(v) && v > 0.0) return v;
        }
        return 1e-9;
    }();
    return tol;
}

namespace {

template <typename S>
S sabs(const S& v) {
    return v < S(0) ? S(-v) : v;
}

template <typename S>
S vdot(const std::vector<S>& u, const std::vector<S>& v) {
    S s(0);
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

template <typename S>
S vmax_abs(const std::vector<S>& v) {
    S m(0);
    for (const auto& e : v) {
        S w = sabs(e);
        if (w > m) m = w;
    }
    return m;
}

template <typename S>
std::vector<S> unit_vec(int n, int i) {
    std::vector<S> v(n, S(0));
    v[i] = S(1);
    return v;
}

/* Standard basis vectors followed by all pairwise sums. */
template <typename S>
std::vector<std::vector<S>> probe_vectors(int n) {
    std::vector<std::vector<S>> ps;
    for (int i = 0; i < n; ++i) ps.push_back(unit_vec<S>(n, i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            auto v = unit_vec<S>(n, i);
            v[j] = S(1);
            ps.push_back(v);
        }
    return ps;
}

Eigen::MatrixXd to_eigen(const SquareMatrix& m) {
    Eigen::MatrixXd e(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) e(i, j) = m(i, j);
    return e;
}

template <typename S>
int elimination_rank(BasicMatrix<S> a) {
    const int n = a.dim();
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        S best(0);
        for (int r = rank; r < n; ++r) {
            S v = sabs(a(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv < 0 || best == S(0)) continue;
        if (piv != rank)
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(rank, j));
        for (int r = rank + 1; r < n; ++r) {
            S f = a(r, col) / a(rank, col);
            if (f == S(0)) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(rank, j);
        }
        ++rank;
    }
    return rank;
}

struct NumericPolicy {
    using Scalar = double;
    double tol;

    bool neg(const double& v, const double& scale) const { return std::abs(v) <= tol * scale; }
    double minor_scale(const std::vector<double>& ax, const std::vector<double>& bx) const {
        return std::sqrt(vdot(ax, ax)) * (1.0 + std::sqrt(vdot(bx, bx)));
    }
    int rank(const SquareMatrix& m) const { return rank_of(m, tol); }
    double proportion(const SquareMatrix& a, const SquareMatrix& b) const {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j) {
                num += a(i, j) * b(i, j);
                den += a(i, j) * a(i, j);
            }
        return num / den;
    }
    bool independent(const double& perp2, const double& v2) const { return perp2 > 1e-18 * v2; }
};

struct ExactPolicy {
    using Scalar = Rational;

    bool neg(const Rational& v, const Rational&) const { return v == 0; }
    Rational minor_scale(const std::vector<Rational>&, const std::vector<Rational>&) const {
        return Rational(1);
    }
    int rank(const RationalMatrix& m) const { return elimination_rank(m); }
    Rational proportion(const RationalMatrix& a, const RationalMatrix& b) const {
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j)
                if (a(i, j) != 0) return b(i, j) / a(i, j);
        throw ZeroMap("first map is zero");
    }
    bool independent(const Rational& perp2, const Rational&) const { return perp2 != 0; }
};

/* Incremental Gram-Schmidt span tracker; exact when the scalar is. */
template <typename S, typename Pol>
class SpanBuilder {
public:
    bool try_add(std::vector<S> v, const Pol& pol) {
        const S v2 = vdot(v, v);
        for (const auto& u : ortho_) {
            S c = vdot(v, u) / vdot(u, u);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
        }
        const S p2 = vdot(v, v);
        if (!pol.independent(p2, v2)) return false;
        ortho_.push_back(std::move(v));
        return true;
    }

private:
    std::vector<std::vector<S>> ortho_;
};

template <typename S, typename Pol>
std::vector<S> nonkernel_probe(const BasicMatrix<S>& a, const BasicMatrix<S>& b,
                               const Pol& pol) {
    for (const auto& x : probe_vectors<S>(a.dim())) {
        auto ax = a.apply(x);
        auto bx = b.apply(x);
        if (!pol.neg(vmax_abs(ax), S(1)) && !pol.neg(vmax_abs(bx), S(1))) return x;
    }
    throw ZeroMap("no probe vector with nonzero images under both maps");
}

template <typename S>
int pivot_index(const std::vector<S>& v) {
    int best = 0;
    S m = sabs(v[0]);
    for (size_t i = 1; i < v.size(); ++i) {
        S w = sabs(v[i]);
        if (w > m) {
            m = w;
            best = static_cast<int>(i);
        }
    }
    return best;
}

template <typename Pol>
BasicCollinearityReport<typename Pol::Scalar> classify_impl(
    const BasicMatrix<typename Pol::Scalar>& a, const BasicMatrix<typename Pol::Scalar>& b,
    const BasicMatrix<typename Pol::Scalar>& h, const Pol& pol) {
    using S = typename Pol::Scalar;
    using Mat = BasicMatrix<S>;
    const int n = a.dim();
    if (b.dim() != n || h.dim() != n)
        throw std::invalid_argument("matrix dimensions must agree");

    if (pol.neg(a.max_abs(), S(1))) throw ZeroMap("first map is zero");

    Mat hinv = Mat::identity(n);
    try {
        hinv = inverse(h);
    } catch (const std::domain_error&) {
        throw NotConjugate("conjugating matrix is singular");
    }
    {
        Mat r = b - h * a * hinv;
        S scale = b.max_abs();
        if (scale < S(1)) scale = S(1);
        if (!pol.neg(r.max_abs(), scale))
            throw NotConjugate("maps are not conjugate by the given matrix");
    }

    for (const auto& x : probe_vectors<S>(n)) {
        auto ax = a.apply(x);
        auto bx = b.apply(x);
        /* A probe inside either kernel has no direction to compare; its
           computed image is rounding noise, so skip it rather than test
           noise against a collapsed scale. */
        if (pol.neg(vmax_abs(ax), a.max_abs()) || pol.neg(vmax_abs(bx), b.max_abs())) continue;
        S scale = pol.minor_scale(ax, bx);
        for (int r = 0; r < n; ++r)
            for (int s = r + 1; s < n; ++s) {
                S m = ax[r] * bx[s] - ax[s] * bx[r];
                if (!pol.neg(sabs(m), scale))
                    throw NotCollinear("images diverge on a probe vector");
            }
    }

    const int rk = pol.rank(a);
    if (rk == 0) throw ZeroMap("first map has rank zero");

    BasicCollinearityReport<S> rep;
    rep.commuter = h;

    if (rk >= 2) {
        S tau = pol.proportion(a, b);
        Mat r = b - tau * a;
        S scale = b.max_abs();
        if (scale < S(1)) scale = S(1);
        if (!pol.neg(r.max_abs(), scale))
            throw NotCollinear("maps are collinear on probes but not proportional");
        rep.kind = CollinearCase::proportional;
        rep.tau = tau;
        return rep;
    }

    /* Rank one: split on the trace, then build an adapted basis in which
       A has a single nonzero entry and B lives in the first row. */
    const S lam = a.trace();
    const bool nilpotent = pol.neg(sabs(lam), a.max_abs());

    const auto x0 = nonkernel_probe(a, b, pol);
    const auto e1 = a.apply(x0);
    const int piv = pivot_index(e1);

    std::vector<std::vector<S>> cols;
    SpanBuilder<S, Pol> kernel_span;
    cols.push_back(e1);
    kernel_span.try_add(e1, pol);
    if (nilpotent) cols.push_back(x0);
    for (int i = 0; i < n && static_cast<int>(cols.size()) < n; ++i) {
        auto fi = unit_vec<S>(n, i);
        auto afi = a.apply(fi);
        S ci = afi[piv] / e1[piv];
        auto ki = fi;
        if (nilpotent) {
            for (int r = 0; r < n; ++r) ki[r] -= ci * x0[r];
        } else {
            for (int r = 0; r < n; ++r) ki[r] -= ci / lam * e1[r];
        }
        if (kernel_span.try_add(ki, pol)) cols.push_back(ki);
    }
    if (static_cast<int>(cols.size()) != n)
        throw NotCollinear("could not complete an adapted basis");

    Mat smat(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) smat(i, j) = cols[j][i];
    Mat sinv = Mat::identity(n);
    try {
        sinv = inverse(smat);
    } catch (const std::domain_error&) {
        throw NotCollinear("adapted basis is numerically singular");
    }
    const Mat bp = sinv * b * smat;

    S bscale = bp.max_abs();
    if (bscale < S(1)) bscale = S(1);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!pol.neg(sabs(bp(i, j)), bscale))
                throw NotCollinear("conjugate map is not supported on the image line");
    {
        const S d00 = bp(0, 0) - (nilpotent ? S(0) : lam);
        if (!pol.neg(sabs(d00), bscale))
            throw NotCollinear("conjugate map has the wrong leading coefficient");
    }

    Mat g(n);
    if (nilpotent) {
        const S q = bp(0, 1);
        if (pol.neg(sabs(q), bscale)) throw NotCollinear("degenerate conjugate pair");
        g(0, 0) = S(1);
        for (int j = 1; j < n; ++j) g(1, j) = bp(0, j);
        for (int i = 2; i < n; ++i) g(i, i) = S(1) / q;
        rep.kind = CollinearCase::rank_one_nilpotent;
    } else {
        g(0, 0) = S(1);
        for (int j = 1; j < n; ++j) g(0, j) = bp(0, j) / lam;
        for (int i = 1; i < n; ++i) g(i, i) = S(1) / lam;
        rep.kind = CollinearCase::rank_one_semisimple;
    }

    const Mat ghat = smat * g * sinv;
    {
        /* The whole point: ghat intertwines the pair and ghat*h commutes
           with A; verify before reporting. */
        Mat r1 = ghat * b - b;
        Mat r2 = a * ghat - b;
        if (!pol.neg(r1.max_abs(), bscale) || !pol.neg(r2.max_abs(), bscale))
            throw NotCollinear("structure matrix failed its defining identity");
    }
    rep.basis = smat;
    rep.structure = ghat;
    rep.commuter = ghat * h;
    return rep;
}

}  // namespace

std::vector<std::complex<double>> spectrum(const SquareMatrix& a) {
    const int n = a.dim();
    if (!all_finite(a)) throw std::invalid_argument("matrix entries must be finite");
    if (n > 4) throw std::invalid_argument("spectrum supports dimensions 2..4");

    std::vector<std::complex<double>> ev;
    if (n == 2) {
        const double t = a.trace();
        const double d = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double disc = t * t - 4.0 * d;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            ev = {{(t - s) / 2.0, 0.0}, {(t + s) / 2.0, 0.0}};
        } else {
            const double s = std::sqrt(-disc);
            ev = {{t / 2.0, -s / 2.0}, {t / 2.0, s / 2.0}};
        }
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a));
        for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()(i));
    }
    std::sort(ev.begin(), ev.end(), [](std::complex<double> u, std::complex<double> v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return ev;
}

int rank_of(const SquareMatrix& a, double tol) {
    const double scale = a.max_abs();
    if (scale == 0.0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol * scale) ++r;
    return r;
}

std::string to_string(CollinearCase c) {
    switch (c) {
        case CollinearCase::proportional: return "proportional";
        case CollinearCase::rank_one_semisimple: return "rank-one semisimple";
        case CollinearCase::rank_one_nilpotent: return "rank-one nilpotent";
    }
    return "?";
}

CollinearityReport collinear_classify(const SquareMatrix& a, const SquareMatrix& b,
                                      const SquareMatrix& h, double tol) {
    return classify_impl(a, b, h, NumericPolicy{tol});
}

RationalCollinearityReport collinear_classify_exact(const RationalMatrix& a,
                                                    const RationalMatrix& b,
                                                    const RationalMatrix& h) {
    return classify_impl(a, b, h, ExactPolicy{});
}

std::vector<double> find_nonkernel_vector(const SquareMatrix& a, const SquareMatrix& b,
                                          double tol) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimensions must agree");
    if (a.max_abs() <= tol) throw ZeroMap("first map is zero");
    if (b.max_abs() <= tol) throw ZeroMap("second map is zero");
    return nonkernel_probe(a, b, NumericPolicy{tol});
}

std::string to_string(JacobiFamily f) {
    switch (f) {
        case JacobiFamily::rotation: return "rotation";
        case JacobiFamily::reflection: return "reflection";
        case JacobiFamily::unipotent_plus: return "unipotent+";
        case JacobiFamily::unipotent_minus: return "unipotent-";
        case JacobiFamily::mixed_plus_minus: return "mixed+-";
        case JacobiFamily::mixed_minus_plus: return "mixed-+";
    }
    return "?";
}

SquareMatrix jacobi_family_matrix(JacobiFamily family, double omega, double b) {
    const double w = b * omega;
    switch (family) {
        case JacobiFamily::rotation:
            return SquareMatrix{{std::cos(w), std::sin(w)}, {-std::sin(w), std::cos(w)}};
        case JacobiFamily::reflection:
            return SquareMatrix{{std::cos(w), std::sin(w)}, {std::sin(w), -std::cos(w)}};
        case JacobiFamily::unipotent_plus:
            return SquareMatrix{{1.0, w}, {0.0, 1.0}};
        case JacobiFamily::unipotent_minus:
            return SquareMatrix{{-1.0, w}, {0.0, -1.0}};
        case JacobiFamily::mixed_plus_minus:
            return SquareMatrix{{1.0, w}, {0.0, -1.0}};
        case JacobiFamily::mixed_minus_plus:
            return SquareMatrix{{-1.0, w}, {0.0, 1.0}};
    }
    throw std::invalid_argument("unknown family");
}

namespace {

double matrix_residual(const SquareMatrix& h, const SquareMatrix& model) {
    return (h - model).max_abs();
}

}  // namespace

JacobiClass jacobi_classify(const SquareMatrix& h, const SquareMatrix& a, double tol) {
    if (h.dim() != 2 || a.dim() != 2)
        throw std::invalid_argument("classification is for 2x2 matrices");

    const double ascale = std::max(1.0, a.max_abs());
    const bool rotation_type = std::abs(a(0, 0)) <= tol * ascale &&
                               std::abs(a(1, 1)) <= tol * ascale &&
                               std::abs(a(0, 1) + a(1, 0)) <= tol * ascale &&
                               std::abs(a(0, 1)) > tol * ascale;
    const bool nil_upper = std::abs(a(0, 0)) <= tol * ascale &&
                           std::abs(a(1, 1)) <= tol * ascale &&
                           std::abs(a(1, 0)) <= tol * ascale && std::abs(a(0, 1)) > tol * ascale;
    const bool nil_lower = std::abs(a(0, 0)) <= tol * ascale &&
                           std::abs(a(1, 1)) <= tol * ascale &&
                           std::abs(a(0, 1)) <= tol * ascale && std::abs(a(1, 0)) > tol * ascale;

    const double hscale = std::max(1.0, h.max_abs());

    if (rotation_type) {
        const double b = a(0, 1);
        const double w = std::atan2(h(0, 1), h(0, 0));
        const double omega = w / b;
        for (auto fam : {JacobiFamily::rotation, JacobiFamily::reflection}) {
            if (matrix_residual(h, jacobi_family_matrix(fam, omega, b)) <= tol * hscale)
                return {fam, omega};
        }
        throw NotInFamily("matrix does not match a rotation-type model");
    }

    if (nil_upper || nil_lower) {
        SquareMatrix hn = h;
        double b;
        if (nil_lower) {
            /* Swap coordinates to bring the linear part to upper form. */
            hn = SquareMatrix{{h(1, 1), h(1, 0)}, {h(0, 1), h(0, 0)}};
            b = a(1, 0);
        } else {
            b = a(0, 1);
        }
        if (std::abs(hn(1, 0)) > tol * hscale)
            throw NotInFamily("matrix is not upper triangular in adapted coordinates");
        auto sign_of = [&](double d) -> int {
            if (std::abs(d - 1.0) <= tol * hscale) return 1;
            if (std::abs(d + 1.0) <= tol * hscale) return -1;
            return 0;
        };
        const int s1 = sign_of(hn(0, 0));
        const int s2 = sign_of(hn(1, 1));
        if (s1 == 0 || s2 == 0) throw NotInFamily("diagonal entries are not unit");
        JacobiFamily fam;
        if (s1 > 0 && s2 > 0)
            fam = JacobiFamily::unipotent_plus;
        else if (s1 < 0 && s2 < 0)
            fam = JacobiFamily::unipotent_minus;
        else if (s1 > 0)
            fam = JacobiFamily::mixed_plus_minus;
        else
            fam = JacobiFamily::mixed_minus_plus;
        const double omega = hn(0, 1) / b;
        if (matrix_residual(hn, jacobi_family_matrix(fam, omega, b)) > tol * hscale)
            throw NotInFamily("matrix does not match its unipotent model");
        return {fam, omega};
    }

    throw InvalidSpec("linear part is not a recognized normal form");
}

}  // namespace centerkit

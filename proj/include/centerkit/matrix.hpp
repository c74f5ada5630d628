#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace centerkit {

/* Dense square matrix, row-major.  Instantiated with double for numeric
   work and with an exact rational type for the exact classification path. */
template <typename Scalar>
class BasicMatrix {
public:
    explicit BasicMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, Scalar(0)) {
        if (n < 2) throw std::invalid_argument("matrix dimension must be >= 2");
    }

    BasicMatrix(std::initializer_list<std::initializer_list<Scalar>> rows)
        : n_(static_cast<int>(rows.size())) {
        if (n_ < 2) throw std::invalid_argument("matrix dimension must be >= 2");
        a_.reserve(static_cast<size_t>(n_) * n_);
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n_)
                throw std::invalid_argument("matrix rows must have equal length");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static BasicMatrix identity(int n) {
        BasicMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
        return m;
    }

    static BasicMatrix zero(int n) { return BasicMatrix(n); }

    int dim() const { return n_; }

    Scalar& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const Scalar& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    BasicMatrix operator+(const BasicMatrix& o) const {
        BasicMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
        return r;
    }

    BasicMatrix operator-(const BasicMatrix& o) const {
        BasicMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
        return r;
    }

    BasicMatrix operator*(const BasicMatrix& o) const {
        BasicMatrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                Scalar aik = (*this)(i, k);
                if (aik == Scalar(0)) continue;
                for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    friend BasicMatrix operator*(const Scalar& s, const BasicMatrix& m) {
        BasicMatrix r(m.n_);
        for (size_t k = 0; k < m.a_.size(); ++k) r.a_[k] = s * m.a_[k];
        return r;
    }

    std::vector<Scalar> apply(const std::vector<Scalar>& x) const {
        std::vector<Scalar> y(n_, Scalar(0));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    BasicMatrix transposed() const {
        BasicMatrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Scalar trace() const {
        Scalar t(0);
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    /* Largest absolute entry. */
    Scalar max_abs() const {
        Scalar m(0);
        for (const auto& v : a_) {
            Scalar w = v < Scalar(0) ? Scalar(-v) : v;
            if (w > m) m = w;
        }
        return m;
    }

    bool operator==(const BasicMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }

private:
    int n_;
    std::vector<Scalar> a_;
};

using SquareMatrix = BasicMatrix<double>;

inline bool all_finite(const SquareMatrix& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            if (!std::isfinite(m(i, j))) return false;
    return true;
}

/* Gaussian elimination with partial pivoting; works for double and for
   exact scalar types (where any nonzero pivot is exact). */
template <typename Scalar>
BasicMatrix<Scalar> inverse(const BasicMatrix<Scalar>& m) {
    const int n = m.dim();
    BasicMatrix<Scalar> a = m;
    BasicMatrix<Scalar> inv = BasicMatrix<Scalar>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        Scalar best(0);
        for (int r = col; r < n; ++r) {
            Scalar v = a(r, col) < Scalar(0) ? Scalar(-a(r, col)) : a(r, col);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv < 0 || best == Scalar(0))
            throw std::domain_error("matrix is singular");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Scalar d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) / d;
            inv(col, j) = inv(col, j) / d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Scalar f = a(r, col);
            if (f == Scalar(0)) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

template <typename Scalar>
Scalar determinant(const BasicMatrix<Scalar>& m) {
    const int n = m.dim();
    BasicMatrix<Scalar> a = m;
    Scalar det(1);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        Scalar best(0);
        for (int r = col; r < n; ++r) {
            Scalar v = a(r, col) < Scalar(0) ? Scalar(-a(r, col)) : a(r, col);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv < 0 || best == Scalar(0)) return Scalar(0);
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            det = -det;
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            Scalar f = a(r, col) / a(col, col);
            if (f == Scalar(0)) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

}  // namespace centerkit

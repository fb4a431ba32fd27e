#pragma once

#include <puiseux/scalar.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace puiseux {

// Dense row-major matrix/vector over either scalar backend. Values are
// immutable by convention once handed to another module; all mutating
// operations happen during construction.

template <class S>
class Vector {
  public:
    Vector() = default;
    explicit Vector(std::size_t n) : data_(n, scalar_traits<S>::zero()) {}
    Vector(std::initializer_list<S> xs) : data_(xs) {}

    std::size_t size() const { return data_.size(); }
    S& operator[](std::size_t i) { return data_[i]; }
    const S& operator[](std::size_t i) const { return data_[i]; }

    friend Vector operator+(const Vector& a, const Vector& b) {
        check_same(a, b);
        Vector r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
        return r;
    }
    friend Vector operator-(const Vector& a, const Vector& b) {
        check_same(a, b);
        Vector r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
        return r;
    }
    friend Vector operator*(const S& c, const Vector& a) {
        Vector r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
        return r;
    }
    Vector& operator+=(const Vector& b) { return *this = *this + b; }
    Vector& operator-=(const Vector& b) { return *this = *this - b; }

    friend bool operator==(const Vector& a, const Vector& b) { return a.data_ == b.data_; }

    double norm_approx() const {
        double s = 0;
        for (const S& x : data_) {
            double a = scalar_traits<S>::abs_approx(x);
            s += a * a;
        }
        return std::sqrt(s);
    }

  private:
    static void check_same(const Vector& a, const Vector& b) {
        if (a.size() != b.size())
            throw Error(errc::invalid_input, "vector dimension mismatch");
    }
    std::vector<S> data_;
};

// (x, y) = sum conj(x_i) y_i, conjugate-linear in the first argument.
template <class S>
S inner(const Vector<S>& x, const Vector<S>& y) {
    if (x.size() != y.size()) throw Error(errc::invalid_input, "inner: dimension mismatch");
    S acc = scalar_traits<S>::zero();
    for (std::size_t i = 0; i < x.size(); ++i) acc = acc + conj_s(x[i]) * y[i];
    return acc;
}

template <class S>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, scalar_traits<S>::zero()) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scalar_traits<S>::one();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vector<S> col(std::size_t j) const {
        Vector<S> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    Vector<S> row(std::size_t i) const {
        Vector<S> v(cols_);
        for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
        return v;
    }
    void set_col(std::size_t j, const Vector<S>& v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    Matrix conjugate_transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = conj_s((*this)(i, j));
        return r;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        check_same(a, b);
        Matrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        check_same(a, b);
        Matrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
        return r;
    }
    friend Matrix operator*(const S& c, const Matrix& a) {
        Matrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = c * a.data_[k];
        return r;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error(errc::invalid_input, "matrix product dimension mismatch");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const S& aik = a(i, k);
                if (scalar_traits<S>::exact && scalar_traits<S>::is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    r(i, j) = r(i, j) + aik * b(k, j);
            }
        return r;
    }
    friend Vector<S> operator*(const Matrix& a, const Vector<S>& x) {
        if (a.cols_ != x.size()) throw Error(errc::invalid_input, "matrix-vector dimension mismatch");
        Vector<S> r(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            S acc = scalar_traits<S>::zero();
            for (std::size_t j = 0; j < a.cols_; ++j) acc = acc + a(i, j) * x[j];
            r[i] = acc;
        }
        return r;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    // Largest Euclidean row norm; the scale for relative rank thresholds.
    double max_row_norm_approx() const {
        double best = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < cols_; ++j) {
                double a = scalar_traits<S>::abs_approx((*this)(i, j));
                s += a * a;
            }
            best = std::max(best, std::sqrt(s));
        }
        return best;
    }

    double max_abs_approx() const {
        double best = 0;
        for (const S& x : data_) best = std::max(best, scalar_traits<S>::abs_approx(x));
        return best;
    }

  private:
    static void check_same(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw Error(errc::invalid_input, "matrix dimension mismatch");
    }
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<S> data_;
};

template <class S>
Matrix<S> pow_matrix(const Matrix<S>& a, unsigned e) {
    if (a.rows() != a.cols()) throw Error(errc::invalid_input, "pow_matrix: square required");
    Matrix<S> acc = Matrix<S>::identity(a.rows());
    Matrix<S> base = a;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Elimination engine.
//
// Exact backend: first-nonzero pivoting (deterministic, no growth concerns
// over a field). Floating backend: partial pivoting by magnitude; entries
// whose magnitude falls below rank_rel_threshold * max row norm of the input
// are treated as zero for rank decisions.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
struct Echelon {
    Matrix<S> mat;                       // reduced row echelon form
    std::vector<std::size_t> pivot_cols; // one per pivot row
    double scale = 1.0;                  // threshold scale used (float mode)
};

template <class S>
bool negligible(const S& x, const ToleranceConfig& tol, double scale) {
    if constexpr (scalar_traits<S>::exact)
        return scalar_traits<S>::is_zero(x);
    else
        return scalar_traits<S>::abs_approx(x) <= tol.rank_rel_threshold * scale;
}

// Reduced row echelon form with unit pivots.
template <class S>
Echelon<S> rref(Matrix<S> a, const ToleranceConfig& tol) {
    Echelon<S> out;
    const std::size_t nr = a.rows(), nc = a.cols();
    double scale = 1.0;
    if constexpr (!scalar_traits<S>::exact) scale = std::max(a.max_row_norm_approx(), 1e-300);
    std::size_t row = 0;
    for (std::size_t col = 0; col < nc && row < nr; ++col) {
        // pivot selection
        std::size_t piv = nr;
        if constexpr (scalar_traits<S>::exact) {
            for (std::size_t i = row; i < nr; ++i)
                if (!scalar_traits<S>::is_zero(a(i, col))) { piv = i; break; }
        } else {
            double best = tol.rank_rel_threshold * scale;
            for (std::size_t i = row; i < nr; ++i) {
                double v = scalar_traits<S>::abs_approx(a(i, col));
                if (v > best) { best = v; piv = i; }
            }
        }
        if (piv == nr) continue;
        if (piv != row)
            for (std::size_t j = 0; j < nc; ++j) std::swap(a(row, j), a(piv, j));
        const S inv = scalar_traits<S>::one() / a(row, col);
        for (std::size_t j = col; j < nc; ++j) a(row, j) = inv * a(row, j);
        a(row, col) = scalar_traits<S>::one();
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == row) continue;
            const S f = a(i, col);
            if (scalar_traits<S>::exact ? scalar_traits<S>::is_zero(f)
                                        : scalar_traits<S>::abs_approx(f) == 0.0)
                continue;
            for (std::size_t j = col; j < nc; ++j) a(i, j) = a(i, j) - f * a(row, j);
            a(i, col) = scalar_traits<S>::zero();
        }
        out.pivot_cols.push_back(col);
        ++row;
    }
    out.mat = std::move(a);
    out.scale = scale;
    return out;
}

} // namespace detail

template <class S>
std::size_t rank(const Matrix<S>& a, const ToleranceConfig& tol = {}) {
    return detail::rref(a, tol).pivot_cols.size();
}

template <class S>
std::vector<std::size_t> pivot_columns(const Matrix<S>& a, const ToleranceConfig& tol = {}) {
    return detail::rref(a, tol).pivot_cols;
}

// Solve M x = b for square invertible M.
template <class S>
Vector<S> solve_linear(const Matrix<S>& m, const Vector<S>& b, const ToleranceConfig& tol = {}) {
    if (m.rows() != m.cols() || m.rows() != b.size())
        throw Error(errc::invalid_input, "solve_linear: dimension mismatch");
    const std::size_t n = m.rows();
    Matrix<S> aug(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n) = b[i];
    }
    auto ech = detail::rref(aug, tol);
    if (ech.pivot_cols.size() < n || ech.pivot_cols[n - 1] != n - 1)
        throw Error(errc::singular_matrix, "solve_linear: rank-deficient matrix");
    Vector<S> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = ech.mat(i, n);
    return x;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& m, const ToleranceConfig& tol = {}) {
    if (m.rows() != m.cols()) throw Error(errc::invalid_input, "inverse: square required");
    const std::size_t n = m.rows();
    Matrix<S> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = scalar_traits<S>::one();
    }
    auto ech = detail::rref(aug, tol);
    if (ech.pivot_cols.size() < n || ech.pivot_cols[n - 1] != n - 1)
        throw Error(errc::singular_matrix, "inverse: rank-deficient matrix");
    Matrix<S> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = ech.mat(i, n + j);
    return inv;
}

// Basis of the null space. Free variables are set to one, one at a time, in
// ascending column order, so the result is deterministic in both backends.
template <class S>
std::vector<Vector<S>> kernel_basis(const Matrix<S>& a, const ToleranceConfig& tol = {}) {
    auto ech = detail::rref(a, tol);
    const std::size_t nc = a.cols();
    std::vector<bool> is_pivot(nc, false);
    for (std::size_t c : ech.pivot_cols) is_pivot[c] = true;
    std::vector<Vector<S>> basis;
    for (std::size_t free = 0; free < nc; ++free) {
        if (is_pivot[free]) continue;
        Vector<S> v(nc);
        v[free] = scalar_traits<S>::one();
        for (std::size_t r = 0; r < ech.pivot_cols.size(); ++r)
            v[ech.pivot_cols[r]] = -ech.mat(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Particular solution of a possibly singular consistent system, free
// variables pinned to zero. Throws SingularMatrix when inconsistent.
template <class S>
Vector<S> solve_consistent(const Matrix<S>& m, const Vector<S>& b, const ToleranceConfig& tol = {}) {
    if (m.rows() != b.size()) throw Error(errc::invalid_input, "solve_consistent: dimension mismatch");
    const std::size_t nr = m.rows(), nc = m.cols();
    Matrix<S> aug(nr, nc + 1);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) aug(i, j) = m(i, j);
        aug(i, nc) = b[i];
    }
    auto ech = detail::rref(aug, tol);
    if (!ech.pivot_cols.empty() && ech.pivot_cols.back() == nc)
        throw Error(errc::singular_matrix, "solve_consistent: inconsistent system");
    Vector<S> x(nc);
    for (std::size_t r = 0; r < ech.pivot_cols.size(); ++r) x[ech.pivot_cols[r]] = ech.mat(r, nc);
    return x;
}

} // namespace puiseux

#pragma once

#include <puiseux/series.hpp>

#include <algorithm>
#include <numbers>
#include <optional>
#include <vector>

namespace puiseux {

// Truncated bivariate expansion of f(eps, lambda0 + mu) = det(lambda I - A(eps)):
// table(i, j) is the coefficient of eps^i mu^j. The mu direction is always
// complete (degree n, monic); the eps direction is truncated at deg_eps.
template <class S>
struct CharTable {
    S lambda0;
    std::size_t deg_eps = 0;
    std::size_t deg_mu = 0;
    std::vector<std::vector<S>> a; // a[i][j]

    const S& coeff(std::size_t i, std::size_t j) const {
        static const S zero = scalar_traits<S>::zero();
        if (i > deg_eps || j > deg_mu) return zero;
        return a[i][j];
    }

    double max_abs_approx() const {
        double best = 0;
        for (const auto& row : a)
            for (const S& x : row) best = std::max(best, scalar_traits<S>::abs_approx(x));
        return best;
    }
};

// The bivariate partials of f at (0, lambda0) that the low-order coefficient
// formulas consume; these are the a_10, a_0m, a_0(m+1), a_11, a_20 entries of
// the expansion table.
template <class S>
struct CharPartials {
    S f_eps;                 // df/d_eps
    S f_lam_m_over_mfact;    // (1/m!) d^m f / d_lambda^m
    S f_lam_m1_over_m1fact;  // (1/(m+1)!) d^(m+1) f / d_lambda^(m+1)
    S f_lam_eps;             // d^2 f / d_lambda d_eps
    S f_eps2_over_2;         // (1/2) d^2 f / d_eps^2
    unsigned m = 0;
    double table_scale = 1.0; // float-mode zero-test scale
};

namespace detail {

// --- exact route: fraction-free elimination over (S[mu])[eps]/(eps^(E+1)) ---
//
// Ring elements are eps-series (truncated) whose coefficients are dense
// polynomials in mu. Bareiss runs without pivoting: every pivot is a leading
// principal minor of (lambda0 + mu) I - A(eps), hence monic in mu of degree
// equal to its size and in particular a nonzero divisor, and the eps-order-0
// polynomial division below is exact.

template <class S>
using MuPoly = std::vector<S>; // coefficient of mu^d at index d

template <class S>
void mu_trim(MuPoly<S>& p) {
    while (!p.empty() && scalar_traits<S>::is_zero(p.back())) p.pop_back();
}

template <class S>
MuPoly<S> mu_add(const MuPoly<S>& x, const MuPoly<S>& y, bool negate_y = false) {
    MuPoly<S> r(std::max(x.size(), y.size()), scalar_traits<S>::zero());
    for (std::size_t d = 0; d < x.size(); ++d) r[d] = x[d];
    for (std::size_t d = 0; d < y.size(); ++d) r[d] = negate_y ? r[d] - y[d] : r[d] + y[d];
    mu_trim(r);
    return r;
}

template <class S>
MuPoly<S> mu_mul(const MuPoly<S>& x, const MuPoly<S>& y) {
    if (x.empty() || y.empty()) return {};
    MuPoly<S> r(x.size() + y.size() - 1, scalar_traits<S>::zero());
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (scalar_traits<S>::is_zero(x[d])) continue;
        for (std::size_t e = 0; e < y.size(); ++e) r[d + e] = r[d + e] + x[d] * y[e];
    }
    mu_trim(r);
    return r;
}

// Exact polynomial division over the coefficient field; the callers only
// divide when the quotient is known to be polynomial.
template <class S>
MuPoly<S> mu_divexact(MuPoly<S> num, const MuPoly<S>& den) {
    if (den.empty()) throw Error(errc::invalid_input, "mu_divexact: zero divisor");
    if (num.empty()) return {};
    if (num.size() < den.size())
        throw Error(errc::invalid_input, "mu_divexact: inexact division");
    MuPoly<S> q(num.size() - den.size() + 1, scalar_traits<S>::zero());
    const S lead_inv = scalar_traits<S>::one() / den.back();
    for (std::size_t d = q.size(); d-- > 0;) {
        S c = num[d + den.size() - 1] * lead_inv;
        q[d] = c;
        if (scalar_traits<S>::is_zero(c)) continue;
        for (std::size_t e = 0; e < den.size(); ++e)
            num[d + e] = num[d + e] - c * den[e];
    }
    for (const S& rem : num)
        if (!scalar_traits<S>::is_zero(rem))
            throw Error(errc::invalid_input, "mu_divexact: nonzero remainder");
    return q;
}

template <class S>
struct EpsPoly {
    std::vector<MuPoly<S>> c; // c[k] multiplies eps^k; fixed size E+1

    explicit EpsPoly(std::size_t order) : c(order + 1) {}

    static EpsPoly scalar_value(std::size_t order, const S& v) {
        EpsPoly r(order);
        if (!scalar_traits<S>::is_zero(v)) r.c[0] = {v};
        return r;
    }
    bool is_zero() const {
        for (const auto& p : c)
            if (!p.empty()) return false;
        return true;
    }
};

template <class S>
EpsPoly<S> eps_sub(const EpsPoly<S>& x, const EpsPoly<S>& y) {
    EpsPoly<S> r(x.c.size() - 1);
    for (std::size_t k = 0; k < x.c.size(); ++k) r.c[k] = mu_add(x.c[k], y.c[k], true);
    return r;
}

template <class S>
EpsPoly<S> eps_mul(const EpsPoly<S>& x, const EpsPoly<S>& y) {
    const std::size_t E = x.c.size() - 1;
    EpsPoly<S> r(E);
    for (std::size_t k = 0; k <= E; ++k)
        for (std::size_t l = 0; l + k <= E; ++l) {
            if (x.c[k].empty() || y.c[l].empty()) continue;
            r.c[k + l] = mu_add(r.c[k + l], mu_mul(x.c[k], y.c[l]));
        }
    return r;
}

// Exact series division; den.c[0] must be a nonzero mu-polynomial.
template <class S>
EpsPoly<S> eps_divexact(const EpsPoly<S>& num, const EpsPoly<S>& den) {
    const std::size_t E = num.c.size() - 1;
    EpsPoly<S> q(E);
    for (std::size_t k = 0; k <= E; ++k) {
        MuPoly<S> acc = num.c[k];
        for (std::size_t j = 1; j <= k; ++j)
            acc = mu_add(acc, mu_mul(den.c[j], q.c[k - j]), true);
        if (acc.empty() && den.c[0].empty())
            throw Error(errc::invalid_input, "eps_divexact: zero divisor");
        q.c[k] = acc.empty() ? MuPoly<S>{} : mu_divexact(acc, den.c[0]);
    }
    return q;
}

template <class S>
CharTable<S> char_table_exact(const MatrixSeries<S>& series, const S& lambda0,
                              std::size_t deg_eps) {
    const std::size_t n = series.dim();
    // M = (lambda0 + mu) I - A(eps) over the truncated ring.
    std::vector<std::vector<EpsPoly<S>>> M(n, std::vector<EpsPoly<S>>(n, EpsPoly<S>(deg_eps)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            EpsPoly<S>& e = M[i][j];
            for (std::size_t k = 0; k <= deg_eps && k < series.coeffs.size(); ++k) {
                const S v = -series.coeffs[k](i, j);
                if (!scalar_traits<S>::is_zero(v)) e.c[k] = {v};
            }
            if (i == j) {
                MuPoly<S> diag = {lambda0, scalar_traits<S>::one()}; // lambda0 + mu
                e.c[0] = mu_add(e.c[0], diag);
            }
        }

    EpsPoly<S> prev = EpsPoly<S>::scalar_value(deg_eps, scalar_traits<S>::one());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                EpsPoly<S> t = eps_sub(eps_mul(M[k][k], M[i][j]), eps_mul(M[i][k], M[k][j]));
                M[i][j] = eps_divexact(t, prev);
            }
        prev = M[k][k];
    }

    const EpsPoly<S>& det = M[n - 1][n - 1];
    CharTable<S> out;
    out.lambda0 = lambda0;
    out.deg_eps = deg_eps;
    out.deg_mu = n;
    out.a.assign(deg_eps + 1, std::vector<S>(n + 1, scalar_traits<S>::zero()));
    for (std::size_t i = 0; i <= deg_eps; ++i)
        for (std::size_t j = 0; j < det.c[i].size() && j <= n; ++j) out.a[i][j] = det.c[i][j];
    return out;
}

// --- floating route: determinant samples on roots-of-unity grids, inverse DFT ---

inline std::complex<double> det_lu(std::vector<std::complex<double>> a, std::size_t n) {
    std::complex<double> det{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(a[i * n + k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return {0.0, 0.0};
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            det = -det;
        }
        det *= a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::complex<double> f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

inline CharTable<std::complex<double>> char_table_float(
    const MatrixSeries<std::complex<double>>& series, const std::complex<double>& lambda0,
    std::size_t deg_eps) {
    using C = std::complex<double>;
    const std::size_t n = series.dim();
    // det is a polynomial of degree <= n*K in eps and exactly n in mu; sampling
    // on roots of unity makes the coefficient extraction a unitary transform.
    const std::size_t P = n * series.order() + 1;
    const std::size_t Q = n + 1;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<std::vector<C>> f(P, std::vector<C>(Q));
    std::vector<C> buf(n * n);
    for (std::size_t b = 0; b < P; ++b) {
        const C eps = std::polar(1.0, two_pi * double(b) / double(P));
        const Matrix<C> Aeps = series.evaluate(eps);
        for (std::size_t a = 0; a < Q; ++a) {
            const C mu = std::polar(1.0, two_pi * double(a) / double(Q));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    buf[i * n + j] = (i == j ? lambda0 + mu : C{}) - Aeps(i, j);
            f[b][a] = det_lu(buf, n);
        }
    }

    CharTable<C> out;
    out.lambda0 = lambda0;
    out.deg_eps = deg_eps;
    out.deg_mu = n;
    out.a.assign(deg_eps + 1, std::vector<C>(n + 1, C{}));
    for (std::size_t i = 0; i <= deg_eps && i < P; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            C acc{};
            for (std::size_t b = 0; b < P; ++b)
                for (std::size_t a = 0; a < Q; ++a) {
                    const double th =
                        -two_pi * (double(i) * double(b) / double(P) + double(j) * double(a) / double(Q));
                    acc += f[b][a] * std::polar(1.0, th);
                }
            out.a[i][j] = acc / (double(P) * double(Q));
        }
    return out;
}

} // namespace detail

// Coefficient table of f(eps, lambda0 + mu): deg_lam columns are reported,
// though the computation always carries the full mu degree n.
template <class S>
CharTable<S> bivariate_charpoly_truncated(const MatrixSeries<S>& series, const S& lambda0,
                                          std::size_t deg_eps, std::size_t deg_lam) {
    CharTable<S> t;
    if constexpr (scalar_traits<S>::exact)
        t = detail::char_table_exact(series, lambda0, deg_eps);
    else
        t = detail::char_table_float(series, lambda0, deg_eps);
    (void)deg_lam; // table keeps full mu degree; coeff() serves any j
    return t;
}

// Smallest j with a_{0j} != 0; equals the algebraic multiplicity of lambda0.
template <class S>
unsigned algebraic_multiplicity(const CharTable<S>& t, const ToleranceConfig& tol = {}) {
    double scale = 1.0;
    if constexpr (!scalar_traits<S>::exact) {
        for (std::size_t j = 0; j <= t.deg_mu; ++j)
            scale = std::max(scale, scalar_traits<S>::abs_approx(t.coeff(0, j)));
    }
    if (!scalar_traits<S>::is_zero(t.coeff(0, 0), tol, scale))
        throw Error(errc::not_an_eigenvalue, "f(0, lambda0) != 0: lambda0 is not an eigenvalue of A(0)");
    for (std::size_t j = 1; j <= t.deg_mu; ++j)
        if (!scalar_traits<S>::is_zero(t.coeff(0, j), tol, scale)) return unsigned(j);
    throw Error(errc::invalid_input, "characteristic polynomial vanished identically (bad table)");
}

template <class S>
CharPartials<S> char_partials(const CharTable<S>& t, unsigned m) {
    if (t.deg_eps < 2)
        throw Error(errc::insufficient_order, "partials need an eps-degree-2 table");
    CharPartials<S> p;
    p.f_eps = t.coeff(1, 0);
    p.f_lam_m_over_mfact = t.coeff(0, m);
    p.f_lam_m1_over_m1fact = t.coeff(0, m + 1);
    p.f_lam_eps = t.coeff(1, 1);
    p.f_eps2_over_2 = t.coeff(2, 0);
    p.m = m;
    p.table_scale = scalar_traits<S>::exact ? 1.0 : t.max_abs_approx();
    return p;
}

template <class S>
struct GenericConditionResult {
    bool holds = false;
    S alpha1_pow_m = scalar_traits<S>::zero(); // -f_eps / (f_lam^m / m!), when it holds
};

// Theorem criterion: f has a simple zero in eps at (0, lambda0).
template <class S>
GenericConditionResult<S> generic_condition_charpoly(const CharPartials<S>& p,
                                                     const ToleranceConfig& tol = {}) {
    GenericConditionResult<S> r;
    if (scalar_traits<S>::is_zero(p.f_eps, tol, p.table_scale)) return r;
    r.holds = true;
    r.alpha1_pow_m = -p.f_eps / p.f_lam_m_over_mfact;
    return r;
}

// Coefficients c_0..c_n of det(lambda I - A) = sum c_k lambda^k by the
// Faddeev-LeVerrier trace recursion (monic, c_n = 1). Kept separate from the
// bivariate routes above so it can serve as an independent cross-check.
template <class S>
std::vector<S> char_poly(const Matrix<S>& a) {
    if (a.rows() != a.cols()) throw Error(errc::invalid_input, "char_poly: square required");
    const std::size_t n = a.rows();
    std::vector<S> c(n + 1, scalar_traits<S>::zero());
    c[n] = scalar_traits<S>::one();
    Matrix<S> m = Matrix<S>::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix<S> am = a * m;
        S tr = scalar_traits<S>::zero();
        for (std::size_t i = 0; i < n; ++i) tr = tr + am(i, i);
        c[n - k] = -(tr / scalar_traits<S>::from_int(long(k)));
        if (k < n) {
            m = am;
            for (std::size_t i = 0; i < n; ++i) m(i, i) = m(i, i) + c[n - k];
        }
    }
    return c;
}

} // namespace puiseux

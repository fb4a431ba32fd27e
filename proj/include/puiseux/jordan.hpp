#pragma once

#include <puiseux/dense.hpp>

#include <optional>
#include <vector>

namespace puiseux {

// Similarity frame splitting A_0 into J_m(lambda0) plus a complementary
// invariant block W_0 (not necessarily in Jordan form itself; downstream
// formulas only use block diagonality and invertibility of W_0 - lambda0 I).
//
// u_i are the first m columns of U (the Jordan chain, u_1 the eigenvector);
// v_i are the conjugated first m rows of U^-1, so (v_i, u_j) = delta_ij.
template <class S>
struct JordanFrame {
    std::size_t n = 0;
    unsigned m = 0;
    S lambda0;
    Matrix<S> U, U_inv;
    Matrix<S> Lambda;
    Matrix<S> W0; // (n-m) x (n-m), possibly 0x0

    Vector<S> u(unsigned i) const { // 1-based, 1 <= i <= m
        if (i < 1 || i > m) throw Error(errc::invalid_input, "chain vector index out of range");
        return U.col(i - 1);
    }
    Vector<S> v(unsigned i) const { // 1-based, 1 <= i <= m
        if (i < 1 || i > m) throw Error(errc::invalid_input, "left vector index out of range");
        Vector<S> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = conj_s(U_inv(i - 1, j));
        return w;
    }
};

// Lambda = U blockdiag(J_m(0)^*, (W0 - lambda0 I)^-1) U^-1. The inner block
// acts as the one-sided inverse of A_0 - lambda0 I off the eigendirection.
template <class S>
Matrix<S> lambda_matrix(const Matrix<S>& U, const Matrix<S>& U_inv, unsigned m, const S& lambda0,
                        const Matrix<S>& W0, const ToleranceConfig& tol = {}) {
    const std::size_t n = U.rows();
    Matrix<S> inner(n, n);
    for (unsigned i = 1; i < m; ++i) inner(i, i - 1) = scalar_traits<S>::one(); // J_m(0)^*
    if (n > m) {
        Matrix<S> shifted = W0;
        for (std::size_t i = 0; i < n - m; ++i) shifted(i, i) = shifted(i, i) - lambda0;
        Matrix<S> winv;
        try {
            winv = inverse(shifted, tol);
        } catch (const Error&) {
            throw Error(errc::singular_complement,
                        "lambda0 is an eigenvalue of the complementary block W0");
        }
        for (std::size_t i = 0; i < n - m; ++i)
            for (std::size_t j = 0; j < n - m; ++j) inner(m + i, m + j) = winv(i, j);
    }
    return U * inner * U_inv;
}

namespace detail {

template <class S>
void normalize_generator(Vector<S>& u1) {
    if constexpr (scalar_traits<S>::exact) {
        for (std::size_t i = 0; i < u1.size(); ++i)
            if (!scalar_traits<S>::is_zero(u1[i])) {
                u1 = (scalar_traits<S>::one() / u1[i]) * u1;
                return;
            }
    } else {
        std::size_t best = 0;
        double bv = 0;
        for (std::size_t i = 0; i < u1.size(); ++i) {
            double v = scalar_traits<S>::abs_approx(u1[i]);
            if (v > bv) { bv = v; best = i; }
        }
        if (bv > 0) u1 = (scalar_traits<S>::one() / u1[best]) * u1;
    }
}

template <class S>
void check_block_structure(const Matrix<S>& t, unsigned m, const S& lambda0,
                           double scale, const ToleranceConfig& tol) {
    const std::size_t n = t.rows();
    auto bad = [&](const S& got, const S& want) {
        if constexpr (scalar_traits<S>::exact)
            return !(got == want);
        else
            return scalar_traits<S>::abs_approx(got - want) > 1e3 * tol.rank_rel_threshold * scale;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const bool in_block = i < m && j < m;
            if (in_block) {
                S want = i == j ? lambda0
                                : (j == i + 1 ? scalar_traits<S>::one() : scalar_traits<S>::zero());
                if (bad(t(i, j), want))
                    throw Error(errc::not_single_block,
                                "similarity does not produce J_m(lambda0) in the leading block");
            } else if (i < m || j < m) { // off-diagonal coupling blocks must vanish
                if (bad(t(i, j), scalar_traits<S>::zero()))
                    throw Error(errc::not_single_block,
                                "similarity does not block-diagonalize A(0)");
            }
        }
}

} // namespace detail

// Builds the frame for a given eigenvalue/multiplicity from scratch:
// kernel -> Jordan chain -> invariant complement = range((A0 - lambda0 I)^m).
template <class S>
JordanFrame<S> build_frame(const Matrix<S>& A0, const S& lambda0, unsigned m,
                           const ToleranceConfig& tol = {}) {
    if (A0.rows() != A0.cols()) throw Error(errc::invalid_input, "build_frame: square required");
    const std::size_t n = A0.rows();
    if (m < 1 || m > n) throw Error(errc::invalid_input, "build_frame: bad multiplicity");

    Matrix<S> B = A0;
    for (std::size_t i = 0; i < n; ++i) B(i, i) = B(i, i) - lambda0;

    auto kern = kernel_basis(B, tol);
    if (kern.size() != 1)
        throw Error(errc::not_single_block,
                    "geometric multiplicity of lambda0 is " + std::to_string(kern.size()) +
                        ", need exactly 1");

    std::vector<Vector<S>> chain;
    chain.push_back(kern.front());
    detail::normalize_generator(chain.front());
    const double chain_scale = std::max(B.max_row_norm_approx(), 1.0);
    for (unsigned i = 1; i < m; ++i) {
        Vector<S> next;
        try {
            next = solve_consistent(B, chain.back(), tol);
        } catch (const Error&) {
            throw Error(errc::chain_solve_failed,
                        "Jordan chain equation (A0 - lambda0 I) u_" + std::to_string(i + 1) +
                            " = u_" + std::to_string(i) + " has no solution");
        }
        if constexpr (!scalar_traits<S>::exact) {
            // pin the free kernel component: make the solution orthogonal to u1
            const Vector<S>& u1 = chain.front();
            const S proj = inner(u1, next) / inner(u1, u1);
            next -= proj * u1;
            const double res = (B * next - chain.back()).norm_approx();
            if (res > 1e3 * tol.rank_rel_threshold * chain_scale * std::max(1.0, next.norm_approx()))
                throw Error(errc::chain_solve_failed, "chain solve residual too large");
        }
        chain.push_back(std::move(next));
    }

    Matrix<S> U(n, n);
    for (unsigned i = 0; i < m; ++i) U.set_col(i, chain[i]);
    if (n > m) {
        // invariant complement: the column space of B^m
        Matrix<S> Bm = pow_matrix(B, m);
        auto pivots = pivot_columns(Bm, tol);
        if (pivots.size() != n - m)
            throw Error(errc::not_single_block,
                        "rank of (A0 - lambda0 I)^m inconsistent with a single m-block");
        for (std::size_t k = 0; k < pivots.size(); ++k) U.set_col(m + k, Bm.col(pivots[k]));
    }

    Matrix<S> U_inv;
    try {
        U_inv = inverse(U, tol);
    } catch (const Error&) {
        throw Error(errc::chain_solve_failed, "assembled frame basis is numerically singular");
    }

    Matrix<S> t = U_inv * A0 * U;
    detail::check_block_structure(t, m, lambda0, std::max(A0.max_row_norm_approx(), 1.0), tol);

    JordanFrame<S> f;
    f.n = n;
    f.m = m;
    f.lambda0 = lambda0;
    f.W0 = Matrix<S>(n - m, n - m);
    for (std::size_t i = 0; i < n - m; ++i)
        for (std::size_t j = 0; j < n - m; ++j) f.W0(i, j) = t(m + i, m + j);
    f.Lambda = lambda_matrix(U, U_inv, m, lambda0, f.W0, tol);
    f.U = std::move(U);
    f.U_inv = std::move(U_inv);
    return f;
}

// Frame from a caller-pinned basis U (e.g. a published witness); validates
// that U^-1 A0 U really is blockdiag(J_m(lambda0), W0).
template <class S>
JordanFrame<S> build_frame_from_basis(const Matrix<S>& A0, const S& lambda0, unsigned m,
                                      const Matrix<S>& U, const ToleranceConfig& tol = {}) {
    if (U.rows() != A0.rows() || U.cols() != A0.cols())
        throw Error(errc::invalid_input, "pinned frame basis has wrong dimensions");
    const std::size_t n = A0.rows();
    Matrix<S> U_inv = inverse(U, tol);
    Matrix<S> t = U_inv * A0 * U;
    detail::check_block_structure(t, m, lambda0, std::max(A0.max_row_norm_approx(), 1.0), tol);

    JordanFrame<S> f;
    f.n = n;
    f.m = m;
    f.lambda0 = lambda0;
    f.W0 = Matrix<S>(n - m, n - m);
    for (std::size_t i = 0; i < n - m; ++i)
        for (std::size_t j = 0; j < n - m; ++j) f.W0(i, j) = t(m + i, m + j);
    f.Lambda = lambda_matrix(U, U_inv, m, lambda0, f.W0, tol);
    f.U = U;
    f.U_inv = std::move(U_inv);
    return f;
}

// The named entries of U^-1 A'(0) U next to the Jordan block: a_{m,1} drives
// the generic condition, the other two enter the second-order coefficient.
template <class S>
struct ACoefficients {
    S a_m1;
    std::optional<S> a_m_minus_1_1; // m >= 2 only
    std::optional<S> a_m2;          // m >= 2 only
};

template <class S>
ACoefficients<S> a_coefficients(const JordanFrame<S>& frame, const Matrix<S>& A1) {
    if (A1.rows() != frame.n || A1.cols() != frame.n)
        throw Error(errc::invalid_input, "a_coefficients: A1 has wrong dimensions");
    ACoefficients<S> out{inner(frame.v(frame.m), A1 * frame.u(1)), {}, {}};
    if (frame.m >= 2) {
        out.a_m_minus_1_1 = inner(frame.v(frame.m - 1), A1 * frame.u(1));
        out.a_m2 = inner(frame.v(frame.m), A1 * frame.u(2));
    }
    return out;
}

} // namespace puiseux

#pragma once

#include <puiseux/charpoly.hpp>
#include <puiseux/comb.hpp>
#include <puiseux/jordan.hpp>
#include <puiseux/series.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace puiseux {

// Relative tolerance for agreement between the two generic-condition routes
// (characteristic-polynomial partials vs. (v_m, A_1 u_1)) in float mode.
inline constexpr double kRouteRelTol = 1e-9;

template <class S>
struct PuiseuxExpansion {
    S lambda0;
    unsigned m = 1;
    unsigned order = 0;           // N
    std::vector<S> alphas;        // alpha_1 .. alpha_N
    std::vector<Vector<S>> betas; // beta_0 .. beta_N
    int root_branch = 0;          // which m-th root of (v_m, A_1 u_1) was fixed
    JordanFrame<S> frame;
    S charpoly_alpha1_pow_m; // -f_eps / (f_lam^m/m!)
    S jordan_a_m1;           // (v_m, A_1 u_1)

    const S& alpha(std::size_t k) const { return alphas.at(k - 1); } // 1-based
    const Vector<S>& beta(std::size_t s) const { return betas.at(s); }

    // zeta^p with zeta = exp(2 pi i / m); exact backend throws for branches
    // outside Q(i) (m not in {1,2,4}).
    S zeta_pow(long p) const { return zeta_power(m, p, S{}); }
};

// Incremental state for the stepping scheme: after step s the tables hold
// r_1..r_{s-1}, alpha_1..alpha_s, beta_0..beta_s and p rows 0..s.
template <class S>
struct ExpansionState {
    MatrixSeries<S> series;
    JordanFrame<S> frame;
    PolyTables<S> tables;
    std::vector<Vector<S>> betas;
    ToleranceConfig tol;

    ExpansionState(MatrixSeries<S> ser, JordanFrame<S> fr, const S& alpha1,
                   ToleranceConfig t = {})
        : series(std::move(ser)), frame(std::move(fr)), tables(frame.m), tol(t) {
        tables.push_alpha(alpha1);
        betas.push_back(frame.u(1)); // beta_0 = u_1
        betas.push_back(next_beta(1, *this));
    }

    std::size_t step() const { return betas.size() - 1; }
    const S& alpha(std::size_t k) const { return tables.alpha(k); }
};

// Ensures A_k for k <= idx were actually supplied (zero coefficients must be
// written out by the caller rather than assumed).
template <class S>
void require_series_order(const MatrixSeries<S>& series, std::size_t idx) {
    if (!series.has(idx))
        throw Error(errc::missing_matrix_coefficient,
                    "expansion needs A_" + std::to_string(idx) + " but the series stops at A_" +
                        std::to_string(series.order()) +
                        " (supply explicit zero matrices if the family ends early)");
}

// alpha_1 = (v_m, A_1 u_1)^(1/m) for the chosen branch of the root.
template <class S>
S alpha_one(const JordanFrame<S>& frame, const Matrix<S>& A1, int branch,
            const ToleranceConfig& tol = {}) {
    const S a_m1 = inner(frame.v(frame.m), A1 * frame.u(1));
    const double scale =
        std::max(1.0, A1.max_row_norm_approx() * frame.u(1).norm_approx() *
                          frame.v(frame.m).norm_approx());
    if (scalar_traits<S>::is_zero(a_m1, tol, scale))
        throw Error(errc::generic_condition_fails, "(v_m, A_1 u_1) = 0");
    return mth_root(a_m1, frame.m, unsigned(branch), tol);
}

// alpha_s for s >= 2:
//   alpha_s = ( -r_{s-1} + sum_{i=0}^{min(s,m)-1} sum_{j=i}^{s-1} p_{j,i}
//               (v_{m-i}, sum_{k=1}^{floor((m+s-1-j)/m)} A_k beta_{m+s-1-j-km}) )
//             / (m alpha_1^{m-1})
template <class S>
S next_alpha(std::size_t s, ExpansionState<S>& st) {
    if (s < 2 || st.step() != s - 1)
        throw Error(errc::invalid_input, "next_alpha: state not at step s-1");
    const unsigned m = st.frame.m;
    require_series_order(st.series, (m + s - 1) / m);

    st.tables.ensure_r(s - 1);
    S num = -st.tables.r(s - 1);
    const std::size_t i_max = std::min<std::size_t>(s, m) - 1;
    for (std::size_t j = 0; j + 1 <= s; ++j) {
        const std::size_t rem = m + s - 1 - j;
        Vector<S> w(st.frame.n);
        for (std::size_t k = 1; k <= rem / m; ++k)
            w += st.series.at(k) * st.betas[rem - k * m];
        for (std::size_t i = 0; i <= std::min(j, i_max); ++i) {
            const S& pji = st.tables.p(j, i);
            if (scalar_traits<S>::exact && scalar_traits<S>::is_zero(pji)) continue;
            num = num + pji * inner(st.frame.v(unsigned(m - i)), w);
        }
    }
    const S den = scalar_traits<S>::from_int(long(m)) * pow_int(st.alpha(1), long(m) - 1);
    return num / den;
}

// beta_s:
//   s <= m-1:  sum_{i=0}^{s} p_{s,i} u_{i+1}
//   s >= m:    sum_{i=0}^{m-1} p_{s,i} u_{i+1}
//              - sum_{j=0}^{s-m} sum_{k=0}^{j} sum_{l=1}^{floor((s-j)/m)}
//                p_{j,k} Lambda^{k+1} A_l beta_{s-j-lm}
// The k-sum is evaluated as Lambda * Horner(p_{j,.}, Lambda) applied to the
// accumulated A_l beta vectors.
template <class S>
Vector<S> next_beta(std::size_t s, ExpansionState<S>& st) {
    if (s < 1 || st.tables.alpha_count() < s || st.betas.size() < s)
        throw Error(errc::invalid_input, "next_beta: alpha_s not available yet");
    const unsigned m = st.frame.m;
    st.tables.ensure_p_rows(s);

    Vector<S> beta(st.frame.n);
    const std::size_t chain_terms = std::min<std::size_t>(s, m - 1);
    for (std::size_t i = 1; i <= chain_terms; ++i)
        beta += st.tables.p(s, i) * st.frame.u(unsigned(i + 1));
    if (s < m) return beta;

    require_series_order(st.series, s / m);
    for (std::size_t j = 0; j + m <= s; ++j) {
        Vector<S> y(st.frame.n);
        for (std::size_t l = 1; l <= (s - j) / m; ++l)
            y += st.series.at(l) * st.betas[s - j - l * m];
        // t = sum_{k=0}^{j} p_{j,k} Lambda^k y, then subtract Lambda t
        Vector<S> t = st.tables.p(j, j) * y;
        for (std::size_t k = j; k-- > 0;) t = st.frame.Lambda * t + st.tables.p(j, k) * y;
        beta -= st.frame.Lambda * t;
    }
    return beta;
}

// One cycle of the stepping scheme: r_s -> alpha_{s+1} -> p row s+1 -> beta_{s+1}.
template <class S>
void advance(ExpansionState<S>& st) {
    const std::size_t s = st.step() + 1;
    const S a = next_alpha(s, st);
    st.tables.push_alpha(a);
    st.betas.push_back(next_beta(s, st));
}

// Order-by-order eigen-equation residual
//   (A_0 - lambda0 I) beta_s + sum_{k=1}^{s} (A_{k/m} - alpha_k I) beta_{s-k},
// with A_{k/m} := 0 whenever m does not divide k. Identically zero for a
// correct expansion; an independent check since the recursion is derived
// from this identity rather than evaluated through it.
template <class S>
Vector<S> eigen_equation_residual(const PuiseuxExpansion<S>& exp, const MatrixSeries<S>& series,
                                  std::size_t s) {
    if (s < 1 || s > exp.order) throw Error(errc::invalid_input, "residual: s out of range");
    const std::size_t n = series.dim();
    Matrix<S> B = series.at(0);
    for (std::size_t i = 0; i < n; ++i) B(i, i) = B(i, i) - exp.lambda0;
    Vector<S> res = B * exp.beta(s);
    for (std::size_t k = 1; k <= s; ++k) {
        Vector<S> term(n);
        if (k % exp.m == 0) term = series.at(k / exp.m) * exp.beta(s - k);
        term -= exp.alpha(k) * exp.beta(s - k);
        res += term;
    }
    return res;
}

namespace detail {

template <class S>
bool values_agree(const S& x, const S& y) {
    if constexpr (scalar_traits<S>::exact) {
        return x == y;
    } else {
        const double ax = std::abs(x), ay = std::abs(y);
        const double scale = std::max({ax, ay, 1e-300});
        return std::abs(x - y) <= kRouteRelTol * scale;
    }
}

} // namespace detail

template <class S>
struct ExpandOptions {
    unsigned pinned_m = 0;                  // 0 = infer from the characteristic polynomial
    std::optional<Matrix<S>> pinned_frame;  // optional witness basis U
};

// Full pipeline of the main theorem: multiplicity, generic condition via both
// routes, frame, then N steps of the recursion.
template <class S>
PuiseuxExpansion<S> expand(const MatrixSeries<S>& series, const S& lambda0, unsigned N, int branch,
                           const ToleranceConfig& tol = {}, const ExpandOptions<S>& opts = {}) {
    if (N < 1) throw Error(errc::invalid_input, "expansion order must be >= 1");
    const std::size_t n = series.dim();
    if (n == 0) throw Error(errc::invalid_input, "empty matrix series");

    const CharTable<S> table = bivariate_charpoly_truncated(series, lambda0, 2, n);
    const unsigned m = algebraic_multiplicity(table, tol);
    if (opts.pinned_m != 0 && opts.pinned_m != m)
        throw Error(errc::multiplicity_mismatch,
                    "declared multiplicity " + std::to_string(opts.pinned_m) +
                        " but the characteristic polynomial gives " + std::to_string(m));
    if (branch < 0 || unsigned(branch) >= m)
        throw Error(errc::invalid_input, "root branch must lie in 0..m-1");

    const CharPartials<S> partials = char_partials(table, m);
    const GenericConditionResult<S> gc = generic_condition_charpoly(partials, tol);

    require_series_order(series, (m + N - 1) / m);

    JordanFrame<S> frame;
    try {
        frame = opts.pinned_frame
                    ? build_frame_from_basis(series.at(0), lambda0, m, *opts.pinned_frame, tol)
                    : build_frame(series.at(0), lambda0, m, tol);
    } catch (const Error& e) {
        if (e.code() == errc::not_single_block && gc.holds)
            throw Error(errc::route_disagreement,
                        "characteristic polynomial says the generic condition holds, but no "
                        "single Jordan block was found: " + std::string(e.what()));
        throw;
    }

    const Matrix<S> A1 = series.at(1);
    const S a_m1 = inner(frame.v(m), A1 * frame.u(1));
    const double a_scale = std::max(1.0, A1.max_row_norm_approx() * frame.u(1).norm_approx() *
                                             frame.v(m).norm_approx());
    const bool holds_jordan = !scalar_traits<S>::is_zero(a_m1, tol, a_scale);

    if (holds_jordan != gc.holds)
        throw Error(errc::route_disagreement,
                    "generic-condition verdicts disagree between the characteristic-polynomial "
                    "and (v_m, A_1 u_1) routes");
    if (!gc.holds)
        throw Error(errc::generic_condition_fails,
                    "d/d_eps det(lambda I - A(eps)) vanishes at (0, lambda0)");
    if (!detail::values_agree(gc.alpha1_pow_m, a_m1))
        throw Error(errc::route_disagreement,
                    "alpha_1^m differs between the two routes beyond tolerance");

    const S alpha1 = mth_root(a_m1, m, unsigned(branch), tol);

    ExpansionState<S> st(series, frame, alpha1, tol);
    while (st.step() < N) advance(st);

    PuiseuxExpansion<S> out;
    out.lambda0 = lambda0;
    out.m = m;
    out.order = N;
    for (std::size_t k = 1; k <= N; ++k) out.alphas.push_back(st.alpha(k));
    out.betas.assign(st.betas.begin(), st.betas.begin() + N + 1);
    out.root_branch = branch;
    out.frame = std::move(st.frame);
    out.charpoly_alpha1_pow_m = gc.alpha1_pow_m;
    out.jordan_a_m1 = a_m1;
    return out;
}

// ---------------------------------------------------------------------------
// Closed second-order forms. Both the partial-derivative and inner-product
// expressions for alpha_2 are evaluated and must agree.
// ---------------------------------------------------------------------------

template <class S>
struct SecondOrderCoefficients {
    S alpha1, alpha2;
    Vector<S> beta0, beta1, beta2;
};

template <class S>
SecondOrderCoefficients<S> second_order_closed_form(const JordanFrame<S>& frame,
                                                    const Matrix<S>& A1,
                                                    const std::optional<Matrix<S>>& A2,
                                                    const CharPartials<S>& partials, int branch,
                                                    const ToleranceConfig& tol = {}) {
    const unsigned m = frame.m;
    if (m == 1 && !A2)
        throw Error(errc::missing_matrix_coefficient,
                    "second order with m = 1 needs A_2 (floor((m+1)/m) = 2)");

    SecondOrderCoefficients<S> out;
    out.alpha1 = alpha_one(frame, A1, branch, tol);
    const S& a1 = out.alpha1;
    const auto ac = a_coefficients(frame, A1);
    const Matrix<S>& L = frame.Lambda;

    // partial-derivative form of alpha_2
    S num = pow_int(a1, long(m) + 1) * partials.f_lam_m1_over_m1fact + a1 * partials.f_lam_eps;
    if (m == 1) num = num + partials.f_eps2_over_2;
    const S alpha2_partials =
        -num / (scalar_traits<S>::from_int(long(m)) * pow_int(a1, long(m) - 1) *
                partials.f_lam_m_over_mfact);

    // inner-product form
    S alpha2_inner;
    if (m == 1) {
        const Matrix<S> inner_mat = *A2 - A1 * (L * A1);
        alpha2_inner = inner(frame.v(1), inner_mat * frame.u(1));
    } else {
        alpha2_inner = (*ac.a_m_minus_1_1 + *ac.a_m2) /
                       (scalar_traits<S>::from_int(long(m)) * pow_int(a1, long(m) - 2));
    }
    if (!detail::values_agree(alpha2_partials, alpha2_inner))
        throw Error(errc::route_disagreement,
                    "alpha_2 differs between partial-derivative and inner-product forms");
    out.alpha2 = alpha2_inner;

    out.beta0 = frame.u(1);
    if (m == 1) {
        out.beta1 = -(scalar_traits<S>::one()) * (L * (A1 * frame.u(1)));
        const Matrix<S> LA1 = L * A1;
        const Matrix<S> combo = -(scalar_traits<S>::one()) * (L * (*A2)) + LA1 * LA1 -
                                a1 * (L * (L * A1));
        out.beta2 = combo * frame.u(1);
    } else if (m == 2) {
        out.beta1 = a1 * frame.u(2);
        out.beta2 = out.alpha2 * frame.u(2) - L * (A1 * frame.u(1));
    } else {
        out.beta1 = a1 * frame.u(2);
        out.beta2 = out.alpha2 * frame.u(2) + (a1 * a1) * frame.u(3);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch evaluation: lambda_h(eps) = lambda0 + sum alpha_k (zeta^h eps^(1/m))^k
// and x_h(eps) likewise. The truncation keeps (v_1, x) = 1 exactly because
// (v_1, beta_s) = 0 for s >= 1.
// ---------------------------------------------------------------------------

template <class S>
struct BranchValue {
    S lambda;
    Vector<S> x;
};

template <class S>
BranchValue<S> evaluate_branch(const PuiseuxExpansion<S>& exp, unsigned h, const S& eps,
                               unsigned eps_root_branch = 0, const ToleranceConfig& tol = {}) {
    if (h >= exp.m) throw Error(errc::invalid_input, "branch index out of range");
    BranchValue<S> out{exp.lambda0, exp.beta(0)};
    if (scalar_traits<S>::exact ? scalar_traits<S>::is_zero(eps)
                                : (scalar_traits<S>::abs_approx(eps) == 0.0))
        return out; // every branch collapses to (lambda0, beta_0) at eps = 0

    const S t = mth_root(eps, exp.m, eps_root_branch, tol);
    const S z = exp.zeta_pow(long(h)) * t;
    S zk = scalar_traits<S>::one();
    for (std::size_t k = 1; k <= exp.order; ++k) {
        zk = zk * z;
        out.lambda = out.lambda + exp.alpha(k) * zk;
        out.x += zk * exp.beta(k);
    }
    return out;
}

} // namespace puiseux

#pragma once

#include <puiseux/charpoly.hpp>
#include <puiseux/expansion.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace puiseux {
namespace validation {

using C = std::complex<double>;

// Error magnitudes below this are double-precision saturation; they are
// excluded from slope fits and satisfy every monotonicity requirement.
inline constexpr double kNoiseFloor = 1e-13;

// ---------------------------------------------------------------------------
// Polynomial roots by Aberth-Ehrlich simultaneous iteration. coeffs are
// c_0..c_n of sum c_k z^k with c_n != 0.
// ---------------------------------------------------------------------------

inline std::vector<C> polynomial_roots(std::vector<C> coeffs, double residual_tol = 1e-12,
                                       int max_iters = 500) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    const std::size_t n = coeffs.size() - 1;
    if (n == 0) throw Error(errc::invalid_input, "polynomial_roots: constant polynomial");
    const C lead = coeffs.back();
    for (C& c : coeffs) c /= lead;
    if (n == 1) return {-coeffs[0]};

    // derivative coefficients
    std::vector<C> dcoeffs(n);
    for (std::size_t k = 1; k <= n; ++k) dcoeffs[k - 1] = double(k) * coeffs[k];

    auto horner = [](const std::vector<C>& cs, C z) {
        C acc = cs.back();
        for (std::size_t k = cs.size() - 1; k-- > 0;) acc = acc * z + cs[k];
        return acc;
    };
    // sum |c_k| |z|^k, the natural evaluation scale for a relative residual
    auto eval_scale = [&](C z) {
        const double az = std::abs(z);
        double acc = 1.0; // |c_n| = 1
        for (std::size_t k = n; k-- > 0;) acc = acc * az + std::abs(coeffs[k]);
        return std::max(acc, 1.0);
    };

    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        radius = std::max(radius, std::pow(std::abs(coeffs[k]), 1.0 / double(n - k)));
    radius = 1.0 + radius;
    const C center = -coeffs[n - 1] / double(n);

    std::vector<C> z(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * (double(j) + 0.25) / double(n);
        z[j] = center + radius * std::polar(1.0, th);
    }

    for (int it = 0; it < max_iters; ++it) {
        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            const C p = horner(coeffs, z[i]);
            if (std::abs(p) > residual_tol * eval_scale(z[i])) done = false;
        }
        if (done) return z;
        for (std::size_t i = 0; i < n; ++i) {
            const C p = horner(coeffs, z[i]);
            if (std::abs(p) <= residual_tol * eval_scale(z[i])) continue;
            const C dp = horner(dcoeffs, z[i]);
            if (std::abs(dp) == 0.0) { // sitting on a critical point: nudge off
                z[i] += 1e-8 * (1.0 + std::abs(z[i])) * C{1.0, 1.0};
                continue;
            }
            const C newton = p / dp;
            C repulse{};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const C d = z[i] - z[j];
                if (std::abs(d) == 0.0) { repulse = C{}; break; }
                repulse += 1.0 / d;
            }
            const C denom = 1.0 - newton * repulse;
            z[i] -= std::abs(denom) == 0.0 ? newton : newton / denom;
        }
    }
    throw Error(errc::root_finder_stagnation,
                "Aberth iteration did not reach the residual tolerance");
}

// All n eigenvalues of a complex matrix via the characteristic polynomial
// (trace recursion) and the simultaneous root finder. Unordered.
inline std::vector<C> eigen_oracle(const Matrix<C>& M) {
    if (M.rows() != M.cols()) throw Error(errc::invalid_input, "eigen_oracle: square required");
    if (M.rows() > 32) throw Error(errc::invalid_input, "eigen_oracle: desk scale is n <= 32");
    // scale to unit magnitude so the residual tolerance is meaningful
    const double s = std::max(M.max_abs_approx(), 1e-300);
    Matrix<C> Ms = (C{1.0 / s, 0.0}) * M;
    std::vector<C> roots = polynomial_roots(char_poly(Ms));
    for (C& r : roots) r *= s;
    return roots;
}

// ---------------------------------------------------------------------------
// Branch matching: injective minimum-cost pairing of m predictions into n
// oracle values. Greedy on sorted distances for small m, exact assignment
// (Hungarian with potentials) beyond that.
// ---------------------------------------------------------------------------

struct BranchMatch {
    std::vector<std::size_t> oracle_index; // per prediction
    std::vector<double> errors;            // |predicted - matched oracle value|
};

namespace detail {

inline std::vector<std::size_t> assign_greedy(const std::vector<std::vector<double>>& cost) {
    const std::size_t m = cost.size(), n = cost.front().size();
    struct Entry { double d; std::size_t i, j; };
    std::vector<Entry> all;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) all.push_back({cost[i][j], i, j});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.d < b.d; });
    std::vector<std::size_t> match(m, SIZE_MAX);
    std::vector<bool> used(n, false);
    std::size_t placed = 0;
    for (const Entry& e : all) {
        if (placed == m) break;
        if (match[e.i] != SIZE_MAX || used[e.j]) continue;
        match[e.i] = e.j;
        used[e.j] = true;
        ++placed;
    }
    return match;
}

// O(m^2 n) shortest-augmenting-path assignment, rows <= cols.
inline std::vector<std::size_t> assign_optimal(const std::vector<std::vector<double>>& cost) {
    const std::size_t m = cost.size(), n = cost.front().size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(m + 1), v(n + 1);
    std::vector<std::size_t> p(n + 1, m), way(n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        p[n] = i;
        std::size_t j0 = n;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                if (minv[j] < delta) { delta = minv[j]; j1 = j; }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != m);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    std::vector<std::size_t> match(m);
    for (std::size_t j = 0; j < n; ++j)
        if (p[j] != m) match[p[j]] = j;
    return match;
}

} // namespace detail

inline BranchMatch branch_match(const std::vector<C>& predicted, const std::vector<C>& oracle) {
    if (predicted.empty() || predicted.size() > oracle.size())
        throw Error(errc::invalid_input, "branch_match: need 1 <= |predicted| <= |oracle|");
    std::vector<std::vector<double>> cost(predicted.size(),
                                          std::vector<double>(oracle.size()));
    for (std::size_t i = 0; i < predicted.size(); ++i)
        for (std::size_t j = 0; j < oracle.size(); ++j)
            cost[i][j] = std::abs(predicted[i] - oracle[j]);
    const auto match = predicted.size() <= 8 ? detail::assign_greedy(cost)
                                             : detail::assign_optimal(cost);
    BranchMatch out;
    out.oracle_index = match;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        out.errors.push_back(cost[i][match[i]]);
    return out;
}

// ---------------------------------------------------------------------------
// Convergence diagnostics: truncation error of each branch should decay like
// eps^((N+1)/m). The slope test is one-sided (steeper decay from vanishing
// higher coefficients is a pass) and points under the noise floor are
// excluded; a branch whose errors are all noise passes with the fit skipped.
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    std::vector<double> eps_grid;                   // descending
    std::vector<std::vector<double>> branch_errors; // [h][grid point]
    std::vector<std::vector<double>> residuals;     // [h][grid point]
    std::vector<double> slopes;                     // NaN = fit skipped (noise)
    double expected_slope = 0.0;
    std::vector<bool> branch_pass;
    bool pass = false;
};

inline ConvergenceReport convergence_check(const PuiseuxExpansion<C>& exp,
                                           const MatrixSeries<C>& series,
                                           std::vector<double> grid,
                                           const ToleranceConfig& tol = {}) {
    for (double e : grid)
        if (!(e > 0)) throw Error(errc::invalid_input, "convergence grid must be positive");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.size() < 4 || grid.front() / grid.back() < 100.0)
        throw Error(errc::grid_too_small,
                    "need at least 4 distinct grid points spanning two decades");

    const unsigned m = exp.m;
    ConvergenceReport rep;
    rep.eps_grid = grid;
    rep.expected_slope = double(exp.order + 1) / double(m);
    rep.branch_errors.assign(m, {});
    rep.residuals.assign(m, {});

    for (double eps : grid) {
        const Matrix<C> Aeps = series.evaluate(C{eps, 0.0});
        const std::vector<C> oracle = eigen_oracle(Aeps);
        std::vector<C> predicted(m);
        std::vector<Vector<C>> vecs(m);
        for (unsigned h = 0; h < m; ++h) {
            const auto bv = evaluate_branch(exp, h, C{eps, 0.0}, 0, tol);
            predicted[h] = bv.lambda;
            vecs[h] = bv.x;
        }
        const BranchMatch match = branch_match(predicted, oracle);
        for (unsigned h = 0; h < m; ++h) {
            rep.branch_errors[h].push_back(match.errors[h]);
            Vector<C> r = Aeps * vecs[h];
            r -= predicted[h] * vecs[h];
            rep.residuals[h].push_back(r.norm_approx() / std::max(vecs[h].norm_approx(), 1e-300));
        }
    }

    rep.branch_pass.assign(m, false);
    rep.slopes.assign(m, std::numeric_limits<double>::quiet_NaN());
    bool all_pass = true;
    for (unsigned h = 0; h < m; ++h) {
        // least-squares slope of log(err) against log(eps), above the floor
        std::vector<double> xs, ys;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double err = rep.branch_errors[h][g];
            if (err > kNoiseFloor) {
                xs.push_back(std::log(grid[g]));
                ys.push_back(std::log(err));
            }
        }
        bool slope_ok;
        if (xs.size() < 4 || std::abs(xs.front() - xs.back()) < 2.0 * std::log(10.0)) {
            const double worst =
                *std::max_element(rep.branch_errors[h].begin(), rep.branch_errors[h].end());
            if (worst <= kNoiseFloor) {
                slope_ok = true; // exact to rounding; nothing to fit
            } else {
                throw Error(errc::grid_too_small,
                            "fewer than 4 usable grid points above the noise floor");
            }
        } else {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
            }
            const double den = double(xs.size()) * sxx - sx * sx;
            rep.slopes[h] = (double(xs.size()) * sxy - sx * sy) / den;
            slope_ok = rep.slopes[h] >= rep.expected_slope - 0.25;
        }

        // residuals must not grow along the small-eps tail
        bool mono = true;
        const std::size_t tail_start = grid.size() / 2;
        for (std::size_t g = tail_start; g + 1 < grid.size(); ++g) {
            const double cur = rep.residuals[h][g], nxt = rep.residuals[h][g + 1];
            if (nxt > kNoiseFloor && nxt > cur * 1.05) { mono = false; break; }
        }

        rep.branch_pass[h] = slope_ok && mono;
        all_pass = all_pass && rep.branch_pass[h];
    }
    rep.pass = all_pass;
    return rep;
}

// Log-spaced default grid, eps_max down two+ decades.
inline std::vector<double> default_grid(double eps_max = 1e-2, double eps_min = 1e-6,
                                        std::size_t points = 9) {
    std::vector<double> g;
    for (std::size_t k = 0; k < points; ++k) {
        const double t = double(k) / double(points - 1);
        g.push_back(eps_max * std::pow(eps_min / eps_max, t));
    }
    return g;
}

} // namespace validation
} // namespace puiseux

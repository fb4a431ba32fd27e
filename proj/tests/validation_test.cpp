#include <puiseux/validation.hpp>

#include "support.hpp"

#include <doctest.h>

using namespace puiseux;
using namespace puiseux::validation;
using testsup::CF;
using testsup::GQ;

namespace {

Matrix<CF> companion_of_roots(const std::vector<CF>& roots) {
    const std::size_t n = roots.size();
    std::vector<CF> c(n + 1);
    c[0] = CF{1, 0}; // monic product built up degree by degree
    std::size_t deg = 0;
    for (const CF& r : roots) {
        for (std::size_t k = deg + 1; k-- > 1;) c[k] = c[k - 1] - r * c[k];
        c[0] = -r * c[0];
        ++deg;
    }
    Matrix<CF> m(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = CF{1, 0};
    for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = -c[j];
    return m;
}

double match_cost(const std::vector<std::size_t>& match,
                  const std::vector<std::vector<double>>& cost) {
    double total = 0;
    for (std::size_t i = 0; i < match.size(); ++i) total += cost[i][match[i]];
    return total;
}

} // namespace

TEST_CASE("eigen oracle on pinned matrices") {
    Matrix<CF> swap2(2, 2);
    swap2(0, 1) = CF{1, 0};
    swap2(1, 0) = CF{1, 0};
    auto ev = eigen_oracle(swap2);
    std::sort(ev.begin(), ev.end(), [](CF a, CF b) { return a.real() < b.real(); });
    CHECK(std::abs(ev[0] - CF{-1, 0}) < 1e-12);
    CHECK(std::abs(ev[1] - CF{1, 0}) < 1e-12);

    // worked example at eps = 0.01: eigenvalues eps/2 +- sqrt(eps)/2 sqrt(eps+4)
    auto series = testsup::to_float(testsup::paper_example_series());
    auto ev3 = eigen_oracle(series.evaluate(CF{0.01, 0}));
    const double plus = 0.005 + 0.05 * std::sqrt(4.01);
    const double minus = 0.005 - 0.05 * std::sqrt(4.01);
    auto closest = [&](double x) {
        double best = 1e9;
        for (const CF& e : ev3) best = std::min(best, std::abs(e - CF{x, 0}));
        return best;
    };
    CHECK(closest(plus) < 1e-10);
    CHECK(closest(minus) < 1e-10);

    // triple zero eigenvalue: residual criterion allows cluster radius ~1e-4
    Matrix<CF> j3(3, 3);
    j3(0, 1) = CF{1, 0};
    j3(1, 2) = CF{1, 0};
    for (const CF& e : eigen_oracle(j3)) CHECK(std::abs(e) < 2e-4);
}

TEST_CASE("oracle self-test against companion matrices of known roots") {
    testsup::Rng rng(79);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t deg = 2 + trial % 7; // up to 8
        std::vector<CF> roots;
        for (std::size_t k = 0; k < deg; ++k) {
            // keep roots separated so the match tolerance is meaningful
            for (;;) {
                CF cand{re(rng), im(rng)};
                bool ok = true;
                for (const CF& r : roots) ok = ok && std::abs(cand - r) > 0.3;
                if (ok) { roots.push_back(cand); break; }
            }
        }
        auto ev = eigen_oracle(companion_of_roots(roots));
        auto match = branch_match(roots, ev);
        for (double err : match.errors) CHECK(err < 1e-10);
    }
}

TEST_CASE("branch matching") {
    // predicted truncation of the worked example vs its oracle values
    std::vector<CF> predicted{CF{1.05e-1, 0}};
    std::vector<CF> oracle{CF{1.0512e-1, 0}, CF{-9.51e-2, 0}, CF{0.49, 0}};
    auto m = branch_match(predicted, oracle);
    CHECK(m.oracle_index[0] == 0);
    CHECK(m.errors[0] == doctest::Approx(1.2e-4).epsilon(0.05));

    // identical lists match with zero error
    std::vector<CF> same{CF{0.3, 0.1}, CF{-2, 0}, CF{0, 5}};
    auto m2 = branch_match(same, same);
    for (std::size_t i = 0; i < same.size(); ++i) {
        CHECK(m2.oracle_index[i] == i);
        CHECK(m2.errors[i] == 0.0);
    }

    // symmetric pair keeps its signs
    std::vector<CF> pred{CF{0.1, 0}, CF{-0.1, 0}};
    std::vector<CF> orc{CF{-0.100001, 0}, CF{0.099999, 0}};
    auto m3 = branch_match(pred, orc);
    CHECK(m3.oracle_index[0] == 1);
    CHECK(m3.oracle_index[1] == 0);

    // past the greedy cutoff the assignment is cost-optimal
    testsup::Rng rng(83);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<CF> p10, o12;
    for (int i = 0; i < 10; ++i) p10.push_back(CF{u(rng), u(rng)});
    for (int i = 0; i < 12; ++i) o12.push_back(CF{u(rng), u(rng)});
    auto m4 = branch_match(p10, o12);
    std::vector<std::vector<double>> cost(10, std::vector<double>(12));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 12; ++j) cost[i][j] = std::abs(p10[i] - o12[j]);
    // brute-force the optimum over a few thousand random injections
    double best = match_cost(m4.oracle_index, cost);
    std::vector<std::size_t> perm(12);
    for (int t = 0; t < 4000; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        double c = 0;
        for (int i = 0; i < 10; ++i) c += cost[i][perm[i]];
        CHECK(best <= c + 1e-12);
    }
}

TEST_CASE("convergence of the worked example") {
    auto series = testsup::to_float(testsup::paper_example_series());
    auto e2 = expand(series, CF{0, 0}, 2, 0);
    auto rep = convergence_check(e2, series, default_grid());
    CHECK(rep.pass);
    CHECK(rep.expected_slope == doctest::Approx(1.5));
    for (unsigned h = 0; h < 2; ++h) {
        CHECK(rep.branch_pass[h]);
        CHECK(rep.slopes[h] > 1.25);
        CHECK(rep.slopes[h] < 2.2); // really the 3/2 power, not something faster
    }

    // N = 3: alpha_4 = 0, so the decay is eps^(5/2); the one-sided rule passes
    auto series3 = testsup::to_float(testsup::paper_example_series(2));
    auto e3 = expand(series3, CF{0, 0}, 3, 0);
    auto rep3 = convergence_check(e3, series3, default_grid());
    CHECK(rep3.pass);
    for (unsigned h = 0; h < 2; ++h) CHECK(rep3.slopes[h] > 2.0);
}

TEST_CASE("exact-to-rounding branches skip the slope fit") {
    Matrix<CF> A0(2, 2), A1(2, 2);
    A0(0, 1) = CF{1, 0};
    A1(1, 0) = CF{1, 0};
    MatrixSeries<CF> s({A0, A1});
    auto e = expand(s, CF{0, 0}, 1, 0);
    auto rep = convergence_check(e, s, default_grid());
    CHECK(rep.pass);
    for (unsigned h = 0; h < 2; ++h) {
        CHECK(std::isnan(rep.slopes[h])); // all points at the noise floor
        CHECK(rep.branch_pass[h]);
    }
}

TEST_CASE("grid validation") {
    auto series = testsup::to_float(testsup::paper_example_series());
    auto e = expand(series, CF{0, 0}, 2, 0);
    CHECK_THROWS_AS((void)convergence_check(e, series, {1e-2, 1e-3}), Error);
    CHECK_THROWS_AS((void)convergence_check(e, series, {1e-2, 9e-3, 8e-3, 7e-3}), Error);
    CHECK_THROWS_AS((void)convergence_check(e, series, {1e-2, -1e-3, 1e-4, 1e-5}), Error);
}

TEST_CASE("random generic instances converge at the predicted order") {
    testsup::Rng rng(89);
    int done = 0;
    for (int trial = 0; done < 6 && trial < 12; ++trial) {
        const unsigned m = 2 + trial % 3;
        const std::size_t n = m + 1 + trial % 2;
        const unsigned N = 2 + trial % 3;
        auto inst = testsup::make_generic_instance(rng, n, m, 2);
        auto fser = testsup::to_float(inst.series);
        auto e = expand(fser, to_complex(inst.lambda0), N, 0);
        auto rep = convergence_check(e, fser, default_grid(1e-3, 1e-7, 9));
        CHECK(rep.pass);
        ++done;
    }
    CHECK(done == 6);
}

TEST_CASE("eigenvector residual decays along the grid") {
    auto series = testsup::to_float(testsup::paper_example_series());
    auto e = expand(series, CF{0, 0}, 2, 0);
    auto rep = convergence_check(e, series, default_grid());
    // residual slope should be at least (N+1-(m-1))/m = 1 here
    for (unsigned h = 0; h < 2; ++h) {
        std::vector<double> xs, ys;
        for (std::size_t g = 0; g < rep.eps_grid.size(); ++g)
            if (rep.residuals[h][g] > kNoiseFloor) {
                xs.push_back(std::log(rep.eps_grid[g]));
                ys.push_back(std::log(rep.residuals[h][g]));
            }
        REQUIRE(xs.size() >= 4);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
        }
        const double slope =
            (double(xs.size()) * sxy - sx * sy) / (double(xs.size()) * sxx - sx * sx);
        CHECK(slope >= 1.0 - 0.25);
    }
}

#pragma once

// Shared generators for the property-style tests: random rationals, random
// unit-determinant conjugators, and random generic instances built as
// T diag(J_m(lambda0), W0) T^-1 with a controlled (v_m, A_1 u_1).

#include <puiseux/expansion.hpp>

#include <random>
#include <vector>

namespace testsup {

using puiseux::GaussianRational;
using puiseux::Matrix;
using puiseux::MatrixSeries;
using puiseux::Vector;
using CF = std::complex<double>;
using GQ = GaussianRational;

using Rng = std::mt19937_64;

inline mpq_class rand_rational(Rng& rng, long num_max = 9, long den_max = 9) {
    std::uniform_int_distribution<long> num(-num_max, num_max);
    std::uniform_int_distribution<long> den(1, den_max);
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

inline mpq_class rand_nonzero_rational(Rng& rng, long num_max = 9, long den_max = 9) {
    for (;;) {
        mpq_class q = rand_rational(rng, num_max, den_max);
        if (q != 0) return q;
    }
}

inline GQ rand_scalar(Rng& rng, bool complex_parts = false) {
    GQ z{rand_rational(rng)};
    if (complex_parts) z.im = rand_rational(rng);
    return z;
}

inline Matrix<GQ> rand_matrix(Rng& rng, std::size_t n, bool complex_parts = false) {
    Matrix<GQ> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rand_scalar(rng, complex_parts);
    return m;
}

// Unit lower-triangular times unit upper-triangular: always invertible.
inline Matrix<GQ> rand_conjugator(Rng& rng, std::size_t n) {
    std::uniform_int_distribution<long> small(-2, 2);
    Matrix<GQ> lo = Matrix<GQ>::identity(n), up = Matrix<GQ>::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i > j) lo(i, j) = GQ(small(rng));
            if (i < j) up(i, j) = GQ(small(rng));
        }
    return lo * up;
}

struct GenericInstance {
    MatrixSeries<GQ> series;
    GQ lambda0;
    unsigned m = 0;
    GQ alpha1; // rational m-th root of (v_m, A_1 u_1) after rescaling
};

// A_0 = T diag(J_m(lambda0), W0) T^-1 with W0 upper triangular avoiding
// lambda0; A_1 random, rescaled so (v_m, A_1 u_1) = alpha1^m for a random
// rational alpha1 (keeps exact-mode roots inside Q). Extra coefficients A_2..
// are appended unscaled.
inline GenericInstance make_generic_instance(Rng& rng, std::size_t n, unsigned m,
                                             std::size_t extra_orders = 1,
                                             bool complex_parts = false) {
    GenericInstance inst;
    inst.lambda0 = rand_scalar(rng, complex_parts);
    inst.m = m;

    Matrix<GQ> J(n, n);
    for (unsigned i = 0; i < m; ++i) {
        J(i, i) = inst.lambda0;
        if (i + 1 < m) J(i, i + 1) = puiseux::scalar_traits<GQ>::one();
    }
    std::uniform_int_distribution<long> shift(1, 5);
    for (std::size_t i = m; i < n; ++i) {
        J(i, i) = inst.lambda0 + GQ(shift(rng)); // stays off lambda0
        for (std::size_t j = i + 1; j < n; ++j) J(i, j) = rand_scalar(rng, complex_parts);
    }

    const Matrix<GQ> T = rand_conjugator(rng, n);
    const Matrix<GQ> Tinv = puiseux::inverse(T);
    const Matrix<GQ> A0 = T * J * Tinv;

    Matrix<GQ> A1 = rand_matrix(rng, n, complex_parts);
    // (v_m, A_1 u_1) in the T-frame is entry (m-1, 0) of T^-1 A_1 T
    GQ coupling = (Tinv * A1 * T)(m - 1, 0);
    while (coupling.is_zero()) {
        A1 = rand_matrix(rng, n, complex_parts);
        coupling = (Tinv * A1 * T)(m - 1, 0);
    }
    // positive alpha_1 keeps the principal root of alpha_1^m equal to alpha_1
    inst.alpha1 = GQ{abs(rand_nonzero_rational(rng, 3, 3))};
    const GQ target = puiseux::pow_int(inst.alpha1, long(m));
    A1 = (target / coupling) * A1;

    std::vector<Matrix<GQ>> coeffs{A0, A1};
    for (std::size_t k = 0; k < extra_orders; ++k)
        coeffs.push_back(rand_matrix(rng, n, complex_parts));
    inst.series = MatrixSeries<GQ>(std::move(coeffs));
    return inst;
}

inline Matrix<CF> to_float(const Matrix<GQ>& m) {
    Matrix<CF> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = puiseux::to_complex(m(i, j));
    return out;
}

inline MatrixSeries<CF> to_float(const MatrixSeries<GQ>& s) {
    std::vector<Matrix<CF>> coeffs;
    for (const auto& c : s.coeffs) coeffs.push_back(to_float(c));
    return MatrixSeries<CF>(std::move(coeffs));
}

inline Vector<CF> to_float(const Vector<GQ>& v) {
    Vector<CF> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = puiseux::to_complex(v[i]);
    return out;
}

// The paper's worked 3x3 example: A(eps) = A0 + eps A1, lambda0 = 0, m = 2.
inline MatrixSeries<GQ> paper_example_series(std::size_t extra_zero_orders = 0) {
    Matrix<GQ> A0(3, 3), A1(3, 3);
    const mpq_class h(1, 2);
    A0(0, 0) = GQ{-h};  A0(0, 1) = GQ(1L);  A0(0, 2) = GQ{h};
    A0(1, 0) = GQ{h};   A0(1, 1) = GQ(0L);  A0(1, 2) = GQ{-h};
    A0(2, 0) = GQ(-1L); A0(2, 1) = GQ(1L);  A0(2, 2) = GQ(1L);
    A1(0, 0) = GQ(2L);  A1(0, 2) = GQ(-1L);
    A1(1, 0) = GQ(2L);  A1(1, 2) = GQ(-1L);
    A1(2, 0) = GQ(1L);
    std::vector<Matrix<GQ>> coeffs{A0, A1};
    for (std::size_t k = 0; k < extra_zero_orders; ++k) coeffs.emplace_back(3, 3);
    return MatrixSeries<GQ>(std::move(coeffs));
}

inline Matrix<GQ> paper_example_U() {
    Matrix<GQ> U(3, 3);
    const long vals[3][3] = {{1, 1, 1}, {0, 1, 1}, {1, 1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) U(i, j) = GQ(vals[i][j]);
    return U;
}

} // namespace testsup

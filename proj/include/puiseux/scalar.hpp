#pragma once

#include <puiseux/errors.hpp>

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

namespace puiseux {

// Thresholds used by the floating backend. The exact backend ignores them.
// rank_rel_threshold is a relative factor; elimination multiplies it by the
// largest row norm of the matrix being reduced.
struct ToleranceConfig {
    double zero_threshold = 1e-10;
    double rank_rel_threshold = 1e-8;
};

// ---------------------------------------------------------------------------
// Exact scalar: complex numbers with arbitrary-precision rational parts.
// ---------------------------------------------------------------------------

struct GaussianRational {
    mpq_class re, im;

    GaussianRational() : re(0), im(0) {}
    GaussianRational(long v) : re(v), im(0) {}
    GaussianRational(mpq_class r) : re(std::move(r)), im(0) {}
    GaussianRational(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    // |z|^2 as an exact rational.
    mpq_class norm2() const { return re * re + im * im; }

    GaussianRational conj() const { return {re, -im}; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        mpq_class n2 = b.norm2();
        if (n2 == 0) throw Error(errc::invalid_input, "division by zero GaussianRational");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline std::complex<double> to_complex(const GaussianRational& z) {
    return {z.re.get_d(), z.im.get_d()};
}
inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }

// ---------------------------------------------------------------------------
// Backend traits. Every templated module is parameterized on S being either
// GaussianRational or std::complex<double>.
// ---------------------------------------------------------------------------

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<GaussianRational> {
    static constexpr bool exact = true;
    static GaussianRational zero() { return {}; }
    static GaussianRational one() { return GaussianRational(1L); }
    static GaussianRational from_int(long v) { return GaussianRational(v); }
    static GaussianRational conj(const GaussianRational& z) { return z.conj(); }
    static double abs_approx(const GaussianRational& z) { return std::abs(to_complex(z)); }
    // Exact zero test; thresholds are irrelevant in this backend.
    static bool is_zero(const GaussianRational& z, const ToleranceConfig& = {}, double = 1.0) {
        return z.is_zero();
    }
};

template <>
struct scalar_traits<std::complex<double>> {
    static constexpr bool exact = false;
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static std::complex<double> from_int(long v) { return {double(v), 0.0}; }
    static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
    static double abs_approx(const std::complex<double>& z) { return std::abs(z); }
    // scale lets callers make the test relative to their own data magnitude.
    static bool is_zero(const std::complex<double>& z, const ToleranceConfig& tol = {},
                        double scale = 1.0) {
        return std::abs(z) <= tol.zero_threshold * (scale > 0 ? scale : 1.0);
    }
};

template <class S>
S conj_s(const S& z) { return scalar_traits<S>::conj(z); }

// z^e by repeated squaring; e may be negative for invertible z.
template <class S>
S pow_int(S base, long e) {
    if (e < 0) {
        base = scalar_traits<S>::one() / base;
        e = -e;
    }
    S acc = scalar_traits<S>::one();
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Rational parsing/formatting ("p/q" or "p", optional sign).
// ---------------------------------------------------------------------------

inline mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw Error(errc::invalid_input, "cannot parse rational '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string format_rational(const mpq_class& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// m-th roots.
//
// The principal branch is fixed by arg(root) in (-pi/m, pi/m]; branch k
// multiplies by exp(2*pi*i*k/m). In the exact backend the requested branch is
// recovered by rationalizing a floating approximation and verifying the power
// exactly, so a value is returned iff that branch really lies in Q(i).
// ---------------------------------------------------------------------------

namespace detail {

// Best rational approximation with bounded denominator (continued fractions).
// Returns false when x is not this close to any such rational.
inline bool rationalize(double x, mpq_class& out, double max_den = 1e12, double rel_tol = 1e-11) {
    if (!std::isfinite(x)) return false;
    const double scale = std::max(1.0, std::abs(x));
    // Continued-fraction convergents p/q of x.
    double a = x;
    mpz_class p0 = 1, q0 = 0, p1 = 0, q1 = 1; // (p0,q0) previous, (p1,q1) before that
    for (int it = 0; it < 64; ++it) {
        if (std::abs(a) > 9e15) break;
        const double fl = std::floor(a);
        mpz_class ai(fl);
        mpz_class p = ai * p0 + p1;
        mpz_class q = ai * q0 + q1;
        if (q.get_d() > max_den) break;
        p1 = p0; q1 = q0; p0 = p; q0 = q;
        const double approx = mpq_class(p0, q0 == 0 ? mpz_class(1) : q0).get_d();
        if (q0 != 0 && std::abs(approx - x) <= rel_tol * scale) {
            out = mpq_class(p0, q0);
            out.canonicalize();
            return true;
        }
        const double frac = a - fl;
        if (frac < 1e-15) break;
        a = 1.0 / frac;
    }
    if (q0 != 0) {
        mpq_class cand(p0, q0);
        cand.canonicalize();
        if (std::abs(cand.get_d() - x) <= rel_tol * scale) {
            out = cand;
            return true;
        }
    }
    return false;
}

inline std::complex<double> principal_root_times_branch(std::complex<double> z, unsigned m,
                                                        unsigned branch) {
    // std::pow uses the principal log, so arg(z) in (-pi,pi] gives the
    // arg(root) in (-pi/m, pi/m] convention directly.
    std::complex<double> r = std::pow(z, 1.0 / double(m));
    const double theta = 2.0 * std::numbers::pi * double(branch) / double(m);
    return r * std::polar(1.0, theta);
}

} // namespace detail

inline std::complex<double> mth_root(const std::complex<double>& z, unsigned m, unsigned branch,
                                     const ToleranceConfig& tol = {}) {
    if (m == 0 || branch >= m) throw Error(errc::invalid_input, "mth_root: bad m/branch");
    if (std::abs(z) <= tol.zero_threshold) throw Error(errc::zero_radicand, "mth_root of zero");
    return detail::principal_root_times_branch(z, m, branch);
}

inline GaussianRational mth_root(const GaussianRational& z, unsigned m, unsigned branch,
                                 const ToleranceConfig& = {}) {
    if (m == 0 || branch >= m) throw Error(errc::invalid_input, "mth_root: bad m/branch");
    if (z.is_zero()) throw Error(errc::zero_radicand, "mth_root of zero");
    if (m == 1) return z;

    const std::complex<double> approx = detail::principal_root_times_branch(to_complex(z), m, branch);
    mpq_class re, im;
    if (detail::rationalize(approx.real(), re) && detail::rationalize(approx.imag(), im)) {
        GaussianRational cand{re, im};
        if (pow_int(cand, long(m)) == z) return cand;
    }
    throw Error(errc::exact_root_not_representable,
                "requested branch of the m-th root is not a Gaussian rational");
}

// zeta^p with zeta = exp(2*pi*i/m). Exact only for m in {1,2,4} (and for
// powers that are multiples of m); other cases are not Gaussian rationals.
inline std::complex<double> zeta_power(unsigned m, long p, const std::complex<double>&) {
    const double theta = 2.0 * std::numbers::pi * double(p) / double(m);
    return std::polar(1.0, theta);
}

inline GaussianRational zeta_power(unsigned m, long p, const GaussianRational&) {
    long r = p % long(m);
    if (r < 0) r += long(m);
    if (r == 0) return GaussianRational(1L);
    if (m == 2) return GaussianRational(-1L); // r == 1
    if (m == 4) {
        switch (r) {
            case 1: return {mpq_class(0), mpq_class(1)};
            case 2: return GaussianRational(-1L);
            default: return {mpq_class(0), mpq_class(-1)};
        }
    }
    throw Error(errc::exact_root_not_representable,
                "zeta^" + std::to_string(p) + " with m=" + std::to_string(m) +
                    " is not a Gaussian rational; use the floating backend");
}

} // namespace puiseux

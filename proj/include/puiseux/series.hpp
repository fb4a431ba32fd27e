#pragma once

#include <puiseux/dense.hpp>

#include <vector>

namespace puiseux {

// The analytic family A(eps) as its Taylor coefficients A_k = (1/k!) d^k A(0).
// The stored coefficients define the family exactly (a polynomial family);
// whether enough of them were supplied for a requested expansion order is the
// caller's gate, not this type's.
template <class S>
struct MatrixSeries {
    std::vector<Matrix<S>> coeffs; // A_0 .. A_K

    MatrixSeries() = default;
    explicit MatrixSeries(std::vector<Matrix<S>> cs) : coeffs(std::move(cs)) { validate(); }

    std::size_t dim() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
    std::size_t order() const { return coeffs.size() - 1; } // K

    // A_k, with A_k = 0 for k beyond the stored order (polynomial family).
    Matrix<S> at(std::size_t k) const {
        if (k < coeffs.size()) return coeffs[k];
        return Matrix<S>(dim(), dim());
    }
    bool has(std::size_t k) const { return k < coeffs.size(); }

    // A(eps) by Horner evaluation.
    Matrix<S> evaluate(const S& eps) const {
        Matrix<S> acc = coeffs.back();
        for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = coeffs[k] + eps * acc;
        return acc;
    }

  private:
    void validate() const {
        if (coeffs.empty()) throw Error(errc::invalid_input, "matrix series needs at least A_0");
        const std::size_t n = coeffs.front().rows();
        for (const auto& c : coeffs)
            if (c.rows() != n || c.cols() != n)
                throw Error(errc::invalid_input, "matrix series coefficients must be square, same size");
    }
};

} // namespace puiseux

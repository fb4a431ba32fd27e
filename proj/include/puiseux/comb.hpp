#pragma once

#include <puiseux/scalar.hpp>

#include <cstddef>
#include <vector>

namespace puiseux {

// Triangular table of the composition polynomials p[j][i] (coefficient of z^j
// in (sum_q alpha_q z^q)^i) together with the derived sequence r_l, both
// grown incrementally as the expansion driver learns new alpha coefficients.
//
// Seeds and recursions:
//   p[0][0] = 1, p[j][0] = 0 for j > 0, p[i][i] = alpha_1^i,
//   p[j][i] = 1/((j-i) alpha_1) * sum_{k=i}^{j-1} ((j+1-k) i - k) alpha_{j+1-k} p[k][i]
//   r_1 = 0,
//   r_l = 1/(l alpha_1)      * sum_{j=1}^{l-1} ((l+1-j) m - (m+j)) alpha_{l+1-j} r_j
//       + (m/l) alpha_1^(m-2) * sum_{j=1}^{l-1} ((l+1-j) m - (m+j)) alpha_{l+1-j} alpha_{j+1}
template <class S>
class PolyTables {
  public:
    explicit PolyTables(unsigned m) : m_(m) {
        p_.push_back({scalar_traits<S>::one()}); // p[0][0] = 1
    }

    unsigned m() const { return m_; }
    std::size_t alpha_count() const { return alphas_.size(); }
    std::size_t p_rows() const { return p_.size(); } // rows 0..p_rows()-1 available
    std::size_t r_count() const { return r_.size(); }

    const S& alpha(std::size_t j) const { return alphas_.at(j - 1); } // 1-based
    const S& p(std::size_t j, std::size_t i) const { return p_.at(j).at(i); }
    const S& r(std::size_t l) const { return r_.at(l - 1); } // 1-based

    // Appends alpha_{J+1}. alpha_1 must be nonzero (the recursions divide by it).
    void push_alpha(const S& a) {
        if (alphas_.empty() && scalar_traits<S>::is_zero(a))
            throw Error(errc::alpha_one_zero, "p/r recursions require alpha_1 != 0");
        alphas_.push_back(a);
    }

    // Extends the p table through row J (needs alphas through alpha_J).
    void ensure_p_rows(std::size_t J) {
        if (J + 1 <= p_.size()) return;
        if (J > alphas_.size())
            throw Error(errc::invalid_input, "p table row needs more alphas than known");
        const S& a1 = alphas_[0];
        for (std::size_t j = p_.size(); j <= J; ++j) {
            std::vector<S> row(j + 1, scalar_traits<S>::zero());
            // row[0] stays 0 for j > 0
            row[j] = pow_int(a1, long(j));
            for (std::size_t i = 1; i < j; ++i) {
                S acc = scalar_traits<S>::zero();
                for (std::size_t k = i; k <= j - 1; ++k) {
                    const long coef = long((j + 1 - k) * i) - long(k);
                    if (coef == 0) continue;
                    acc = acc + scalar_traits<S>::from_int(coef) * alphas_[j - k] * p_[k][i];
                }
                row[i] = acc / (scalar_traits<S>::from_int(long(j - i)) * a1);
            }
            p_.push_back(std::move(row));
        }
    }

    // Extends the r sequence through r_L (needs alphas through alpha_L).
    void ensure_r(std::size_t L) {
        if (L <= r_.size()) return;
        if (L > alphas_.size())
            throw Error(errc::invalid_input, "r sequence entry needs more alphas than known");
        const S& a1 = alphas_[0];
        const S a1_pow = pow_int(a1, long(m_) - 2);
        if (r_.empty()) r_.push_back(scalar_traits<S>::zero()); // r_1 = 0
        for (std::size_t l = r_.size() + 1; l <= L; ++l) {
            S srec = scalar_traits<S>::zero();
            S spoly = scalar_traits<S>::zero();
            for (std::size_t j = 1; j <= l - 1; ++j) {
                const long coef = long((l + 1 - j) * m_) - long(m_ + j);
                if (coef == 0) continue;
                const S c = scalar_traits<S>::from_int(coef) * alphas_[l - j];
                srec = srec + c * r_[j - 1];
                spoly = spoly + c * alphas_[j];
            }
            const S inv_l = scalar_traits<S>::one() / scalar_traits<S>::from_int(long(l));
            r_.push_back(inv_l * (srec / a1 + scalar_traits<S>::from_int(long(m_)) * a1_pow * spoly));
        }
    }

  private:
    unsigned m_;
    std::vector<S> alphas_;
    std::vector<std::vector<S>> p_;
    std::vector<S> r_;
};

// One-shot table builders used by tests and by callers that have all alphas
// up front.
template <class S>
std::vector<std::vector<S>> p_table(const std::vector<S>& alphas, std::size_t j_max,
                                    std::size_t i_max) {
    if (j_max < i_max) throw Error(errc::invalid_input, "p_table: need J_max >= I_max");
    PolyTables<S> t(1);
    for (const S& a : alphas) t.push_alpha(a);
    t.ensure_p_rows(j_max);
    std::vector<std::vector<S>> out(j_max + 1);
    for (std::size_t j = 0; j <= j_max; ++j)
        for (std::size_t i = 0; i <= std::min(j, i_max); ++i) out[j].push_back(t.p(j, i));
    return out;
}

template <class S>
std::vector<S> r_sequence(const std::vector<S>& alphas, std::size_t l_max, unsigned m) {
    PolyTables<S> t(m);
    for (const S& a : alphas) t.push_alpha(a);
    t.ensure_r(l_max);
    std::vector<S> out;
    for (std::size_t l = 1; l <= l_max; ++l) out.push_back(t.r(l));
    return out;
}

// Definitional composition sums. Exponential cost; shipped so downstream
// users can self-verify the recursions on small indices.
namespace oracles {

namespace detail {
template <class S>
void compositions(const std::vector<S>& alphas, std::size_t parts_left, long remaining, long cap,
                  const S& partial, S& acc) {
    if (parts_left == 0) {
        if (remaining == 0) acc = acc + partial;
        return;
    }
    for (long s = 1; s <= cap && s <= remaining; ++s) {
        if (remaining - s < long(parts_left - 1)) break; // each later part >= 1
        compositions(alphas, parts_left - 1, remaining - s, cap,
                     partial * alphas.at(std::size_t(s) - 1), acc);
    }
}
} // namespace detail

// p_{j,i}: sum over s_1+...+s_i = j with 1 <= s_rho <= j-i+1 of prod alpha_{s_rho}.
template <class S>
S p_bruteforce(const std::vector<S>& alphas, std::size_t j, std::size_t i) {
    if (i > j) throw Error(errc::invalid_input, "p_bruteforce: need j >= i");
    if (i == 0) return j == 0 ? scalar_traits<S>::one() : scalar_traits<S>::zero();
    S acc = scalar_traits<S>::zero();
    detail::compositions(alphas, i, long(j), long(j - i + 1), scalar_traits<S>::one(), acc);
    return acc;
}

// r_l: 0 for l = 1; else the sum over s_1+...+s_m = m+l with 1 <= s_rho <= l.
template <class S>
S r_bruteforce(const std::vector<S>& alphas, std::size_t l, unsigned m) {
    if (l < 1) throw Error(errc::invalid_input, "r_bruteforce: need l >= 1");
    if (l == 1) return scalar_traits<S>::zero();
    S acc = scalar_traits<S>::zero();
    detail::compositions(alphas, m, long(m + l), long(l), scalar_traits<S>::one(), acc);
    return acc;
}

} // namespace oracles

} // namespace puiseux

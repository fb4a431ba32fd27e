#pragma once

#include <puiseux/expansion.hpp>
#include <puiseux/validation.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace puiseux {
namespace io {

using json = nlohmann::ordered_json;

// Scalars serialize per backend: exact values as rational strings ("p/q" or
// "p", complex as {"re","im"} of strings), floats as plain numbers or
// {"re","im"} objects. Parsing accepts integers, rational strings, numbers
// (float mode only), and {re, im} objects of any of those.

inline json to_json(const GaussianRational& z) {
    if (z.is_real()) return format_rational(z.re);
    return json{{"re", format_rational(z.re)}, {"im", format_rational(z.im)}};
}

inline json to_json(const std::complex<double>& z) {
    if (z.imag() == 0.0) return z.real();
    return json{{"re", z.real()}, {"im", z.imag()}};
}

namespace detail {

inline mpq_class rational_part_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number_float())
        throw Error(errc::invalid_input,
                    "exact mode rejects floating-point literals; write rationals as strings");
    throw Error(errc::invalid_input, "expected a rational value");
}

inline double double_part_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
    throw Error(errc::invalid_input, "expected a numeric value");
}

} // namespace detail

template <class S>
S scalar_from_json(const json& j);

template <>
inline GaussianRational scalar_from_json<GaussianRational>(const json& j) {
    if (j.is_object()) {
        GaussianRational z;
        if (j.contains("re")) z.re = detail::rational_part_from_json(j.at("re"));
        if (j.contains("im")) z.im = detail::rational_part_from_json(j.at("im"));
        return z;
    }
    return GaussianRational(detail::rational_part_from_json(j));
}

template <>
inline std::complex<double> scalar_from_json<std::complex<double>>(const json& j) {
    if (j.is_object()) {
        double re = j.contains("re") ? detail::double_part_from_json(j.at("re")) : 0.0;
        double im = j.contains("im") ? detail::double_part_from_json(j.at("im")) : 0.0;
        return {re, im};
    }
    return {detail::double_part_from_json(j), 0.0};
}

template <class S>
json to_json_vector(const Vector<S>& v) {
    json a = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
    return a;
}

template <class S>
json to_json_matrix(const Matrix<S>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class S>
Matrix<S> matrix_from_json(const json& j, std::size_t n) {
    if (!j.is_array() || j.size() != n)
        throw Error(errc::invalid_input, "matrix must be an n x n array of rows");
    Matrix<S> m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j.at(i);
        if (!row.is_array() || row.size() != n)
            throw Error(errc::invalid_input, "matrix row has wrong length");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = scalar_from_json<S>(row.at(k));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Problem document.
// ---------------------------------------------------------------------------

template <class S>
struct ProblemSpec {
    std::size_t n = 0;
    MatrixSeries<S> series;
    S lambda0;
    unsigned pinned_m = 0; // 0 = infer from the characteristic polynomial
    unsigned order = 1;
    int root_branch = 0;
    bool validate = false;
    std::vector<double> eps_grid;          // empty = auto grid
    std::optional<Matrix<S>> pinned_frame; // optional witness basis U
    ToleranceConfig tol;
};

inline std::string mode_of(const json& j) {
    const std::string mode = j.value("mode", std::string("exact"));
    if (mode != "exact" && mode != "float")
        throw Error(errc::invalid_input, "mode must be \"exact\" or \"float\"");
    return mode;
}

template <class S>
ProblemSpec<S> parse_problem_spec(const json& j) {
    ProblemSpec<S> spec;
    for (const auto& key : {"n", "matrices", "lambda0", "order"})
        if (!j.contains(key))
            throw Error(errc::invalid_input, std::string("problem spec lacks field '") + key + "'");
    spec.n = j.at("n").get<std::size_t>();
    if (spec.n == 0) throw Error(errc::invalid_input, "n must be positive");

    const json& mats = j.at("matrices");
    if (!mats.is_array() || mats.empty())
        throw Error(errc::invalid_input, "matrices must list A_0..A_K");
    std::vector<Matrix<S>> coeffs;
    for (const json& mj : mats) coeffs.push_back(matrix_from_json<S>(mj, spec.n));
    spec.series = MatrixSeries<S>(std::move(coeffs));

    spec.lambda0 = scalar_from_json<S>(j.at("lambda0"));
    spec.order = j.at("order").get<unsigned>();
    spec.pinned_m = j.value("m", 0u);
    spec.root_branch = j.value("root_branch", 0);
    if (j.contains("validate")) {
        const json& v = j.at("validate");
        spec.validate = true;
        if (v.is_object() && v.contains("eps_grid"))
            spec.eps_grid = v.at("eps_grid").get<std::vector<double>>();
        else if (v.is_boolean())
            spec.validate = v.get<bool>();
    }
    if (j.contains("U")) spec.pinned_frame = matrix_from_json<S>(j.at("U"), spec.n);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        spec.tol.zero_threshold = t.value("zero_threshold", spec.tol.zero_threshold);
        spec.tol.rank_rel_threshold = t.value("rank_rel_threshold", spec.tol.rank_rel_threshold);
    }
    return spec;
}

// Canonical re-serialization; parse(spec_to_json(s)) == s (round-trip).
template <class S>
json spec_to_json(const ProblemSpec<S>& spec, const std::string& mode) {
    json j;
    j["n"] = spec.n;
    j["mode"] = mode;
    j["lambda0"] = to_json(spec.lambda0);
    if (spec.pinned_m != 0) j["m"] = spec.pinned_m;
    j["order"] = spec.order;
    j["root_branch"] = spec.root_branch;
    json mats = json::array();
    for (const auto& c : spec.series.coeffs) mats.push_back(to_json_matrix(c));
    j["matrices"] = std::move(mats);
    if (spec.validate) {
        if (spec.eps_grid.empty()) j["validate"] = json{{"auto", true}};
        else j["validate"] = json{{"eps_grid", spec.eps_grid}};
    }
    if (spec.pinned_frame) j["U"] = to_json_matrix(*spec.pinned_frame);
    j["tolerances"] = json{{"zero_threshold", spec.tol.zero_threshold},
                           {"rank_rel_threshold", spec.tol.rank_rel_threshold}};
    return j;
}

// ---------------------------------------------------------------------------
// Report pieces.
// ---------------------------------------------------------------------------

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json to_json(const validation::ConvergenceReport& r) {
    json j;
    j["pass"] = r.pass;
    j["expected_slope"] = r.expected_slope;
    j["eps_grid"] = r.eps_grid;
    json slopes = json::array();
    for (double s : r.slopes) {
        if (std::isnan(s)) slopes.push_back(nullptr); // fit skipped: noise floor
        else slopes.push_back(s);
    }
    j["slopes"] = std::move(slopes);
    j["branch_pass"] = r.branch_pass;
    j["branch_errors"] = r.branch_errors;
    j["residuals"] = r.residuals;
    return j;
}

template <class S>
json expansion_to_json(const PuiseuxExpansion<S>& exp, bool verbose_frame) {
    json j;
    j["lambda0"] = to_json(exp.lambda0);
    j["m"] = exp.m;
    j["order"] = exp.order;
    j["root_branch"] = exp.root_branch;
    json alphas = json::array();
    for (const S& a : exp.alphas) alphas.push_back(to_json(a));
    j["alphas"] = std::move(alphas);
    json betas = json::array();
    for (const auto& b : exp.betas) betas.push_back(to_json_vector(b));
    j["betas"] = std::move(betas);

    // lambda_h(eps) = lambda0 + sum_k alpha_k zeta^(h k) eps^(k/m), h = 0..m-1
    json branches = json::array();
    for (unsigned h = 0; h < exp.m; ++h) {
        json terms = json::array();
        for (std::size_t k = 1; k <= exp.order; ++k)
            terms.push_back(json{{"k", k},
                                 {"zeta_power", (long(h) * long(k)) % long(exp.m)},
                                 {"coefficient", to_json(exp.alpha(k))}});
        branches.push_back(json{{"h", h}, {"terms", std::move(terms)}});
    }
    j["branches"] = std::move(branches);

    if (verbose_frame) {
        // the frame is a witness, not part of the contract: any basis with the
        // same block structure is equally valid
        json f;
        f["label"] = "witness";
        f["U"] = to_json_matrix(exp.frame.U);
        f["U_inv"] = to_json_matrix(exp.frame.U_inv);
        f["Lambda"] = to_json_matrix(exp.frame.Lambda);
        f["W0"] = to_json_matrix(exp.frame.W0);
        j["frame"] = std::move(f);
    }
    return j;
}

} // namespace io
} // namespace puiseux

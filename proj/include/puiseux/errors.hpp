#pragma once

#include <stdexcept>
#include <string>

namespace puiseux {

// Failure taxonomy shared by all modules. The CLI maps codes onto exit
// statuses, so additions here need a mapping in tools/perturb.cpp.
enum class errc {
    invalid_input,
    zero_radicand,
    exact_root_not_representable,
    singular_matrix,
    insufficient_order,
    not_an_eigenvalue,
    multiplicity_mismatch,
    not_single_block,
    chain_solve_failed,
    singular_complement,
    alpha_one_zero,
    generic_condition_fails,
    missing_matrix_coefficient,
    route_disagreement,
    root_finder_stagnation,
    grid_too_small,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_input: return "InvalidInput";
        case errc::zero_radicand: return "ZeroRadicand";
        case errc::exact_root_not_representable: return "ExactRootNotRepresentable";
        case errc::singular_matrix: return "SingularMatrix";
        case errc::insufficient_order: return "InsufficientOrder";
        case errc::not_an_eigenvalue: return "NotAnEigenvalue";
        case errc::multiplicity_mismatch: return "MultiplicityMismatch";
        case errc::not_single_block: return "NotSingleBlock";
        case errc::chain_solve_failed: return "ChainSolveFailed";
        case errc::singular_complement: return "SingularComplement";
        case errc::alpha_one_zero: return "AlphaOneZero";
        case errc::generic_condition_fails: return "GenericConditionFails";
        case errc::missing_matrix_coefficient: return "MissingMatrixCoefficient";
        case errc::route_disagreement: return "RouteDisagreement";
        case errc::root_finder_stagnation: return "RootFinderStagnation";
        case errc::grid_too_small: return "GridTooSmall";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

} // namespace puiseux

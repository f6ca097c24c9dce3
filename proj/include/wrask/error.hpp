#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wrask {

enum class errc {
    invalid_argument,
    dimension_mismatch,
    non_finite,
    zero_row_inconsistent,
    inadmissible_dual,
    all_zero_residuals,
    zero_vector,
    too_many_columns,
    degenerate_q,
    not_converged,
    invalid_sparsity,
    non_finite_iterate,
    parse_error,
    unsupported_field,
    index_out_of_bounds,
    io_error,
};

constexpr std::string_view to_string(errc code) noexcept {
    switch (code) {
        case errc::invalid_argument: return "InvalidArgument";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::non_finite: return "NonFinite";
        case errc::zero_row_inconsistent: return "ZeroRowInconsistent";
        case errc::inadmissible_dual: return "InadmissibleDual";
        case errc::all_zero_residuals: return "AllZeroResiduals";
        case errc::zero_vector: return "ZeroVector";
        case errc::too_many_columns: return "TooManyColumns";
        case errc::degenerate_q: return "DegenerateQ";
        case errc::not_converged: return "NotConverged";
        case errc::invalid_sparsity: return "InvalidSparsity";
        case errc::non_finite_iterate: return "NonFiniteIterate";
        case errc::parse_error: return "ParseError";
        case errc::unsupported_field: return "UnsupportedField";
        case errc::index_out_of_bounds: return "IndexOutOfBounds";
        case errc::io_error: return "IOError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace wrask

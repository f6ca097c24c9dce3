#pragma once

// Matrix Market text format, densified into a RowMatrix.
//
// Accepted header: %%MatrixMarket matrix <coordinate|array> <real|integer> <general|symmetric>
// (tokens are case-insensitive). Coordinate entries are 1-based (row, col, value)
// triplets; repeated coordinates are summed. Array data is column-major; for
// symmetric arrays only the lower triangle is stored. Comment lines start with '%'.

#include "wrask/core_la.hpp"
#include "wrask/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace wrask::io {

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

[[nodiscard]] inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.push_back({line.substr(start, i - start), start + 1});
        }
    }
    return tokens;
}

[[nodiscard]] inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

[[noreturn]] inline void parse_failure(const std::string& source, std::size_t line, std::size_t column,
                                       const std::string& what) {
    throw error(errc::parse_error,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

[[nodiscard]] inline double parse_real(const Token& token, const std::string& source, std::size_t line) {
    double value = 0.0;
    const char* first = token.text.data();
    const char* last = first + token.text.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        parse_failure(source, line, token.column, "expected a real number, got '" + std::string(token.text) + "'");
    }
    return value;
}

[[nodiscard]] inline std::uint64_t parse_index(const Token& token, const std::string& source, std::size_t line) {
    std::uint64_t value = 0;
    const char* first = token.text.data();
    const char* last = first + token.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        parse_failure(source, line, token.column,
                      "expected a nonnegative integer, got '" + std::string(token.text) + "'");
    }
    return value;
}

[[nodiscard]] inline std::string format_real(double value) {
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return {buffer.data(), ptr};
}

}  // namespace detail

[[nodiscard]] inline RowMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>") {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        detail::parse_failure(source, 1, 1, "empty input, expected a %%MatrixMarket header");
    }
    ++line_no;
    const auto header = detail::tokenize(line);
    if (header.size() != 5 || header[0].text != "%%MatrixMarket") {
        detail::parse_failure(source, line_no, 1,
                              "header must read '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    if (detail::lower(header[1].text) != "matrix") {
        detail::parse_failure(source, line_no, header[1].column, "only 'matrix' objects are supported");
    }
    const std::string format = detail::lower(header[2].text);
    const std::string field = detail::lower(header[3].text);
    const std::string symmetry = detail::lower(header[4].text);
    if (format != "coordinate" && format != "array") {
        detail::parse_failure(source, line_no, header[2].column, "format must be 'coordinate' or 'array'");
    }
    if (field == "complex" || field == "pattern") {
        throw error(errc::unsupported_field, source + ": field '" + field + "' is not supported");
    }
    if (field != "real" && field != "integer" && field != "double") {
        detail::parse_failure(source, line_no, header[3].column, "unknown field '" + field + "'");
    }
    if (symmetry == "skew-symmetric" || symmetry == "hermitian") {
        throw error(errc::unsupported_field, source + ": symmetry '" + symmetry + "' is not supported");
    }
    if (symmetry != "general" && symmetry != "symmetric") {
        detail::parse_failure(source, line_no, header[4].column, "unknown symmetry '" + symmetry + "'");
    }
    const bool symmetric = symmetry == "symmetric";
    const bool coordinate = format == "coordinate";

    // Next non-comment, non-blank line is the size line; later lines hold data.
    const auto next_data_line = [&](std::vector<detail::Token>& tokens) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.front() == '%') {
                continue;
            }
            tokens = detail::tokenize(line);
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    };

    std::vector<detail::Token> tokens;
    if (!next_data_line(tokens)) {
        detail::parse_failure(source, line_no + 1, 1, "missing size line");
    }
    const std::size_t expected_size_tokens = coordinate ? 3 : 2;
    if (tokens.size() != expected_size_tokens) {
        detail::parse_failure(source, line_no, tokens.front().column,
                              "size line needs " + std::to_string(expected_size_tokens) + " integers");
    }
    const auto rows = detail::parse_index(tokens[0], source, line_no);
    const auto cols = detail::parse_index(tokens[1], source, line_no);
    if (rows == 0 || cols == 0) {
        detail::parse_failure(source, line_no, tokens[0].column, "matrix dimensions must be positive");
    }
    if (symmetric && rows != cols) {
        detail::parse_failure(source, line_no, tokens[0].column, "a symmetric matrix must be square");
    }
    std::vector<double> dense(rows * cols, 0.0);

    if (coordinate) {
        const auto entries = detail::parse_index(tokens[2], source, line_no);
        for (std::uint64_t e = 0; e < entries; ++e) {
            if (!next_data_line(tokens)) {
                detail::parse_failure(source, line_no + 1, 1,
                                      "expected " + std::to_string(entries) + " entries, found " + std::to_string(e));
            }
            if (tokens.size() != 3) {
                detail::parse_failure(source, line_no, tokens.front().column,
                                      "coordinate entry needs 'row col value'");
            }
            const auto i = detail::parse_index(tokens[0], source, line_no);
            const auto j = detail::parse_index(tokens[1], source, line_no);
            const double v = detail::parse_real(tokens[2], source, line_no);
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw error(errc::index_out_of_bounds, source + ":" + std::to_string(line_no) + ": entry (" +
                                                           std::to_string(i) + ", " + std::to_string(j) +
                                                           ") outside a " + std::to_string(rows) + "x" +
                                                           std::to_string(cols) + " matrix");
            }
            if (symmetric && j > i) {
                detail::parse_failure(source, line_no, tokens[0].column,
                                      "symmetric storage lists the lower triangle only");
            }
            dense[(i - 1) * cols + (j - 1)] += v;
            if (symmetric && i != j) {
                dense[(j - 1) * cols + (i - 1)] += v;
            }
        }
    } else {
        for (std::uint64_t j = 0; j < cols; ++j) {
            for (std::uint64_t i = symmetric ? j : 0; i < rows; ++i) {
                if (!next_data_line(tokens)) {
                    detail::parse_failure(source, line_no + 1, 1, "array data ends early");
                }
                if (tokens.size() != 1) {
                    detail::parse_failure(source, line_no, tokens[1].column, "array entry needs a single value");
                }
                const double v = detail::parse_real(tokens[0], source, line_no);
                dense[i * cols + j] = v;
                if (symmetric) {
                    dense[j * cols + i] = v;
                }
            }
        }
    }
    if (next_data_line(tokens)) {
        detail::parse_failure(source, line_no, tokens.front().column, "unexpected data after the last entry");
    }
    return {rows, cols, std::move(dense)};
}

[[nodiscard]] inline RowMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw error(errc::io_error, "cannot open '" + path + "'");
    }
    return read_matrix_market(in, path);
}

/// Coordinate/real/general output of every nonzero, row by row, with
/// shortest round-trip number formatting.
inline void write_matrix_market(std::ostream& out, const RowMatrix& a) {
    std::size_t nnz = 0;
    for (double v : a.data()) {
        nnz += v != 0.0 ? 1 : 0;
    }
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = a(i, j);
            if (v != 0.0) {
                out << (i + 1) << ' ' << (j + 1) << ' ' << detail::format_real(v) << '\n';
            }
        }
    }
}

inline void write_matrix_market(const std::string& path, const RowMatrix& a) {
    std::ofstream out(path);
    if (!out) {
        throw error(errc::io_error, "cannot write '" + path + "'");
    }
    write_matrix_market(out, a);
}

/// Whitespace-separated reals; lines starting with '%' or '#' are skipped.
[[nodiscard]] inline Vector read_vector(std::istream& in, const std::string& source = "<stream>") {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && (line.front() == '%' || line.front() == '#')) {
            continue;
        }
        for (const auto& token : detail::tokenize(line)) {
            values.push_back(detail::parse_real(token, source, line_no));
        }
    }
    return Vector(std::move(values));
}

[[nodiscard]] inline Vector read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw error(errc::io_error, "cannot open '" + path + "'");
    }
    return read_vector(in, path);
}

inline void write_vector(std::ostream& out, std::span<const double> v) {
    for (double x : v) {
        out << detail::format_real(x) << '\n';
    }
}

inline void write_vector(const std::string& path, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) {
        throw error(errc::io_error, "cannot write '" + path + "'");
    }
    write_vector(out, v);
}

}  // namespace wrask::io

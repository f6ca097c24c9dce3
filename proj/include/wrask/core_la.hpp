#pragma once

// Dense row-oriented linear algebra used by every solver component.

#include "wrask/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wrask {

namespace detail {

inline void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw error(errc::non_finite, std::string(what) + ": entry " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace detail

/// Real vector that only admits finite entries at construction.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double value = 0.0) : values_(n, value) {
        if (!std::isfinite(value)) {
            throw error(errc::non_finite, "Vector fill value is not finite");
        }
    }
    Vector(std::initializer_list<double> values) : values_(values) { detail::require_finite(values_, "Vector"); }
    explicit Vector(std::vector<double> values) : values_(std::move(values)) {
        detail::require_finite(values_, "Vector");
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] double* data() noexcept { return values_.data(); }
    [[nodiscard]] const double* data() const noexcept { return values_.data(); }
    [[nodiscard]] auto begin() noexcept { return values_.begin(); }
    [[nodiscard]] auto end() noexcept { return values_.end(); }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

    [[nodiscard]] std::span<double> span() noexcept { return values_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return values_; }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> values_;
};

/// Dense row-major m x n matrix with cached row 2-norms.
class RowMatrix {
public:
    RowMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
        : rows_(rows), cols_(cols), data_(std::move(row_major)) {
        if (rows_ == 0 || cols_ == 0) {
            throw error(errc::invalid_argument, "RowMatrix needs at least one row and one column");
        }
        if (data_.size() != rows_ * cols_) {
            throw error(errc::dimension_mismatch, "RowMatrix storage size does not match rows*cols");
        }
        detail::require_finite(data_, "RowMatrix");
        cache_norms();
    }

    RowMatrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()) {
        cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
        if (rows_ == 0 || cols_ == 0) {
            throw error(errc::invalid_argument, "RowMatrix needs at least one row and one column");
        }
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw error(errc::dimension_mismatch, "RowMatrix rows have different lengths");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
        detail::require_finite(data_, "RowMatrix");
        cache_norms();
    }

    [[nodiscard]] static RowMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty() || rows.front().empty()) {
            throw error(errc::invalid_argument, "RowMatrix needs at least one row and one column");
        }
        const std::size_t n = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * n);
        for (const auto& row : rows) {
            if (row.size() != n) {
                throw error(errc::dimension_mismatch, "RowMatrix rows have different lengths");
            }
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return {rows.size(), n, std::move(flat)};
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] double row_norm(std::size_t i) const noexcept { return row_norms_[i]; }
    [[nodiscard]] const std::vector<double>& row_norms() const noexcept { return row_norms_; }
    [[nodiscard]] double row_norm_sq(std::size_t i) const noexcept { return row_norms_sq_[i]; }
    [[nodiscard]] const std::vector<double>& row_norms_sq() const noexcept { return row_norms_sq_; }

    [[nodiscard]] double frobenius_norm_sq() const noexcept {
        return std::accumulate(row_norms_sq_.begin(), row_norms_sq_.end(), 0.0);
    }

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const RowMatrix& lhs, const RowMatrix& rhs) noexcept {
        return lhs.rows_ == rhs.rows_ && lhs.cols_ == rhs.cols_ && lhs.data_ == rhs.data_;
    }

private:
    void cache_norms() {
        row_norms_.resize(rows_);
        row_norms_sq_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            double sq = 0.0;
            for (double v : row(i)) {
                sq += v * v;
            }
            row_norms_sq_[i] = sq;
            row_norms_[i] = std::sqrt(sq);
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::vector<double> row_norms_;
    std::vector<double> row_norms_sq_;
};

/// Four interleaved partial sums; the summation order is fixed, so results are reproducible.
[[nodiscard]] inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t n = a.size();
    const std::size_t blocked = n - n % 4;
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    for (std::size_t i = 0; i < blocked; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (std::size_t i = blocked; i < n; ++i) {
        s0 += a[i] * b[i];
    }
    return (s0 + s1) + (s2 + s3);
}

[[nodiscard]] inline double norm2(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

[[nodiscard]] inline double norm1(std::span<const double> v) noexcept {
    double sum = 0.0;
    for (double x : v) {
        sum += std::abs(x);
    }
    return sum;
}

[[nodiscard]] inline double norm_inf(std::span<const double> v) noexcept {
    double best = 0.0;
    for (double x : v) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

/// Sum of |v_i|^p. At p = 0 this is the number of nonzero entries.
[[nodiscard]] inline double lp_norm_pow(std::span<const double> v, double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "lp_norm_pow needs a finite p >= 0");
    }
    double sum = 0.0;
    if (p == 0.0) {
        for (double x : v) {
            sum += x != 0.0 ? 1.0 : 0.0;
        }
        return sum;
    }
    for (double x : v) {
        sum += std::pow(std::abs(x), p);
    }
    return sum;
}

/// ||v||_p for p > 0, scaled by the max entry so that large p does not overflow.
[[nodiscard]] inline double lp_norm(std::span<const double> v, double p) {
    if (!(p > 0.0)) {
        throw error(errc::invalid_argument, "lp_norm needs p > 0");
    }
    const double scale = norm_inf(v);
    if (scale == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += std::pow(std::abs(x) / scale, p);
    }
    return scale * std::pow(sum, 1.0 / p);
}

[[nodiscard]] inline Vector multiply(const RowMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) {
        throw error(errc::dimension_mismatch, "multiply: x has length " + std::to_string(x.size()) + ", expected " +
                                                  std::to_string(a.cols()));
    }
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out[i] = dot(a.row(i), x);
    }
    return out;
}

[[nodiscard]] inline Vector multiply_transpose(const RowMatrix& a, std::span<const double> y) {
    if (y.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "multiply_transpose: y has wrong length");
    }
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[j] += y[i] * row[j];
        }
    }
    return out;
}

/// out = A x - b, written into a caller-owned buffer.
inline void residual_into(const RowMatrix& a, std::span<const double> x, std::span<const double> b,
                          std::span<double> out) {
    if (x.size() != a.cols() || b.size() != a.rows() || out.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "residual: dimensions of A, x and b disagree");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out[i] = dot(a.row(i), x) - b[i];
    }
}

[[nodiscard]] inline Vector residual(const RowMatrix& a, std::span<const double> x, std::span<const double> b) {
    Vector out(a.rows());
    residual_into(a, x, b, out.span());
    return out;
}

struct NormalizedSystem {
    RowMatrix a;
    Vector b;
    std::vector<std::size_t> dropped_rows;  // original indices of zero rows with b_i = 0
};

/// Scales every row of A (and the matching b_i) to unit 2-norm.
/// Zero rows are dropped when b_i = 0 and rejected otherwise.
[[nodiscard]] inline NormalizedSystem normalize_rows(const RowMatrix& a, std::span<const double> b) {
    if (b.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "normalize_rows: b has wrong length");
    }
    std::vector<double> data;
    data.reserve(a.rows() * a.cols());
    std::vector<double> rhs;
    rhs.reserve(a.rows());
    std::vector<std::size_t> dropped;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double norm = a.row_norm(i);
        if (norm == 0.0) {
            if (b[i] != 0.0) {
                throw error(errc::zero_row_inconsistent,
                            "row " + std::to_string(i) + " is zero but b_i = " + std::to_string(b[i]));
            }
            dropped.push_back(i);
            continue;
        }
        for (double v : a.row(i)) {
            data.push_back(v / norm);
        }
        rhs.push_back(b[i] / norm);
    }
    if (rhs.empty()) {
        throw error(errc::invalid_argument, "normalize_rows: every row of A is zero");
    }
    return {RowMatrix(rhs.size(), a.cols(), std::move(data)), Vector(std::move(rhs)), std::move(dropped)};
}

[[nodiscard]] inline bool rows_are_normalized(const RowMatrix& a, double tol = 1e-12) noexcept {
    return std::all_of(a.row_norms().begin(), a.row_norms().end(),
                       [tol](double norm) { return std::abs(norm - 1.0) <= tol; });
}

}  // namespace wrask

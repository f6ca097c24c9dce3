#pragma once

// Row-selection rules for Kaczmarz sweeps: squared-row-norm sampling,
// residual-power weighted sampling, the greedy maximal-correction rule and the
// partially weighted candidate-comparison loop.

#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace wrask {

enum class SamplingKind { row_norm, weighted, greedy, partially_weighted };

class SamplingRule {
public:
    [[nodiscard]] static SamplingRule row_norm() noexcept { return SamplingRule(SamplingKind::row_norm, 0.0); }
    [[nodiscard]] static SamplingRule greedy() noexcept { return SamplingRule(SamplingKind::greedy, 0.0); }
    [[nodiscard]] static SamplingRule partially_weighted() noexcept {
        return SamplingRule(SamplingKind::partially_weighted, 0.0);
    }
    /// Residual-power rule; 0 < p < infinity. p = 0 is `row_norm()`, p -> infinity is `greedy()`.
    [[nodiscard]] static SamplingRule weighted(double p) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw error(errc::invalid_argument, "weighted sampling needs 0 < p < infinity, got " + std::to_string(p));
        }
        return SamplingRule(SamplingKind::weighted, p);
    }

    [[nodiscard]] SamplingKind kind() const noexcept { return kind_; }
    [[nodiscard]] double p() const noexcept { return p_; }

    /// True when the rule reads the full residual vector every iteration.
    [[nodiscard]] bool needs_full_residual() const noexcept {
        return kind_ == SamplingKind::weighted || kind_ == SamplingKind::greedy;
    }

    friend bool operator==(const SamplingRule&, const SamplingRule&) = default;

private:
    SamplingRule(SamplingKind kind, double p) : kind_(kind), p_(p) {}

    SamplingKind kind_;
    double p_;
};

namespace detail {

/// First index whose cumulative weight exceeds u * total. Zero-weight entries are never returned.
[[nodiscard]] inline std::size_t categorical_index(std::span<const double> cumulative, double u) noexcept {
    const double target = u * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it != cumulative.end()) {
        return static_cast<std::size_t>(it - cumulative.begin());
    }
    // u * total rounded up to total: fall back to the last index with positive weight.
    std::size_t i = cumulative.size() - 1;
    while (i > 0 && cumulative[i] == cumulative[i - 1]) {
        --i;
    }
    return i;
}

/// Writes the cumulative sums of (|r_i| / max|r|)^p into `cumulative`.
inline void weighted_cumulative(std::span<const double> residuals, double p, std::span<double> cumulative) {
    const double scale = norm_inf(residuals);
    if (scale == 0.0) {
        throw error(errc::all_zero_residuals, "every residual is zero; the system is solved");
    }
    double running = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double r = std::abs(residuals[i]);
        running += r == 0.0 ? 0.0 : std::pow(r / scale, p);
        cumulative[i] = running;
    }
}

}  // namespace detail

/// Probabilities |r_i|^p / sum_j |r_j|^p, computed after dividing out max|r_i|.
[[nodiscard]] inline Vector weights(std::span<const double> residuals, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "weights need 0 < p < infinity");
    }
    if (residuals.empty()) {
        throw error(errc::invalid_argument, "weights of an empty residual vector");
    }
    std::vector<double> cumulative(residuals.size());
    detail::weighted_cumulative(residuals, p, cumulative);
    const double total = cumulative.back();
    std::vector<double> out(residuals.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (cumulative[i] - previous) / total;
        previous = cumulative[i];
    }
    return Vector(std::move(out));
}

/// Squared-row-norm sampler with the cumulative table built once.
class RowNormSampler {
public:
    explicit RowNormSampler(const RowMatrix& a) : cumulative_(a.rows()) {
        std::partial_sum(a.row_norms_sq().begin(), a.row_norms_sq().end(), cumulative_.begin());
        if (cumulative_.back() == 0.0) {
            throw error(errc::invalid_argument, "row-norm sampling on a zero matrix");
        }
    }

    std::size_t operator()(SeededRng& rng) const { return detail::categorical_index(cumulative_, rng.uniform()); }

private:
    std::vector<double> cumulative_;
};

/// Index i with probability ||a_i||^2 / ||A||_F^2.
[[nodiscard]] inline std::size_t sample_row_norm(const RowMatrix& a, SeededRng& rng) {
    return RowNormSampler(a)(rng);
}

/// One categorical draw from weights(residuals, p) using a caller-owned scratch table.
[[nodiscard]] inline std::size_t sample_weighted(std::span<const double> residuals, double p, SeededRng& rng,
                                                 std::vector<double>& scratch) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "weighted sampling needs 0 < p < infinity");
    }
    scratch.resize(residuals.size());
    detail::weighted_cumulative(residuals, p, scratch);
    return detail::categorical_index(scratch, rng.uniform());
}

[[nodiscard]] inline std::size_t sample_weighted(std::span<const double> residuals, double p, SeededRng& rng) {
    std::vector<double> scratch;
    return sample_weighted(residuals, p, rng, scratch);
}

/// Smallest index attaining max |r_i|.
[[nodiscard]] inline std::size_t sample_greedy(std::span<const double> residuals) {
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double r = std::abs(residuals[i]);
        if (r > best_value) {
            best_value = r;
            best = i;
        }
    }
    if (!(best_value > 0.0)) {
        throw error(errc::all_zero_residuals, "every residual is zero; the system is solved");
    }
    return best;
}

/// Partially weighted selection over m rows.
///
/// Draw a candidate uniformly and remove it from the pool; keep drawing a
/// challenger uniformly from what remains. The candidate is returned as soon
/// as its absolute residual is strictly larger than the challenger's,
/// otherwise the challenger becomes the candidate and is removed in turn. An
/// exhausted pool returns the current candidate. `abs_residual(i)` is only
/// evaluated on drawn rows.
template <class AbsResidual>
[[nodiscard]] std::size_t select_partially_weighted(std::size_t m, AbsResidual&& abs_residual, SeededRng& rng,
                                                    std::vector<std::size_t>& pool) {
    if (m == 0) {
        throw error(errc::invalid_argument, "partially weighted selection over zero rows");
    }
    pool.resize(m);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // pool[drawn..m) holds U; drawing swaps the pick to the front.
    std::size_t drawn = 0;
    const std::size_t first = static_cast<std::size_t>(rng.uniform_index(m));
    std::swap(pool[0], pool[first]);
    ++drawn;

    std::size_t candidate = pool[0];
    double candidate_residual = abs_residual(candidate);
    while (drawn < m) {
        const std::size_t pos = drawn + static_cast<std::size_t>(rng.uniform_index(m - drawn));
        const std::size_t challenger = pool[pos];
        const double challenger_residual = abs_residual(challenger);
        if (candidate_residual > challenger_residual) {
            return candidate;
        }
        // challenger becomes the candidate and leaves U
        std::swap(pool[drawn], pool[pos]);
        ++drawn;
        candidate = challenger;
        candidate_residual = challenger_residual;
    }
    return candidate;
}

[[nodiscard]] inline std::size_t sample_partially_weighted(std::span<const double> residuals, SeededRng& rng) {
    std::vector<std::size_t> pool;
    return select_partially_weighted(
        residuals.size(), [&](std::size_t i) { return std::abs(residuals[i]); }, rng, pool);
}

}  // namespace wrask

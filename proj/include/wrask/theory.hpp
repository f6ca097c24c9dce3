#pragma once

// Numeric side of the convergence theory: the rate constants of the
// noiseless and noisy bounds, the residual-norm ratio that separates weighted
// from uniform sampling, and an independent solver for the augmented basis
// pursuit problem
//
//     min lambda*||x||_1 + 0.5*||x||_2^2   subject to   A x = b.

#include "wrask/bregman.hpp"
#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/rng.hpp"
#include "wrask/solver.hpp"
#include "wrask/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wrask::theory {

/// ||g||_{p+2}^{p+2} / (||g||_p^p * ||g||_2^2). Always >= 1/len(g); equal to it
/// exactly when every |g_i| is the same.
[[nodiscard]] inline double ratio(std::span<const double> g, double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "ratio needs a finite p >= 0");
    }
    const double scale = norm_inf(g);
    if (scale == 0.0) {
        throw error(errc::zero_vector, "ratio of a zero vector");
    }
    // Homogeneous of degree zero, so work with |g_i| / max|g| <= 1.
    double high = 0.0;
    double low = 0.0;
    double two = 0.0;
    for (double v : g) {
        const double u = std::abs(v) / scale;
        if (u == 0.0) {
            continue;
        }
        const double up = p == 0.0 ? 1.0 : std::pow(u, p);
        low += up;
        high += up * u * u;
        two += u * u;
    }
    return high / (low * two);
}

/// f(x) = sum_i e^{d_i (x+2)} / sum_i e^{d_i x}, evaluated with log-sum-exp.
[[nodiscard]] inline double shifted_exp_ratio(std::span<const double> d, double x) {
    if (d.empty()) {
        throw error(errc::invalid_argument, "shifted_exp_ratio needs at least one exponent");
    }
    if (!(x > 0.0)) {
        throw error(errc::invalid_argument, "shifted_exp_ratio needs x > 0");
    }
    double d_max = 0.0;
    for (double v : d) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw error(errc::invalid_argument, "shifted_exp_ratio needs finite d_i >= 0");
        }
        d_max = std::max(d_max, v);
    }
    double num = 0.0;
    double den = 0.0;
    for (double v : d) {
        num += std::exp((v - d_max) * (x + 2.0));
        den += std::exp((v - d_max) * x);
    }
    return std::exp(2.0 * d_max + std::log(num) - std::log(den));
}

inline constexpr std::size_t kMaxEnumeratedColumns = 20;
inline constexpr double kSingularZeroThreshold = 1e-10;

namespace detail {

/// Smallest nonzero singular value of the columns of A selected by `mask`.
/// Returns 0 when A_J is the zero matrix.
[[nodiscard]] inline double subset_sigma_min(const std::vector<double>& columns, std::size_t rows, std::uint64_t mask,
                                             std::vector<double>& work) {
    work.clear();
    std::size_t k = 0;
    for (std::size_t j = 0; mask >> j; ++j) {
        if ((mask >> j) & 1U) {
            work.insert(work.end(), columns.begin() + static_cast<std::ptrdiff_t>(j * rows),
                        columns.begin() + static_cast<std::ptrdiff_t>((j + 1) * rows));
            ++k;
        }
    }
    const auto sigma = spectral::singular_values_inplace(work, rows, k);
    return spectral::smallest_nonzero(sigma, kSingularZeroThreshold);
}

[[nodiscard]] inline std::vector<double> column_major(const RowMatrix& a) {
    std::vector<double> columns(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            columns[j * a.rows() + i] = a(i, j);
        }
    }
    return columns;
}

}  // namespace detail

/// min over nonempty column subsets J with A_J != 0 of the smallest nonzero
/// singular value of A_J. Exhaustive, so limited to n <= 20.
[[nodiscard]] inline double sigma_tilde_min(const RowMatrix& a) {
    if (a.cols() > kMaxEnumeratedColumns) {
        throw error(errc::too_many_columns,
                    "sigma_tilde_min enumerates all 2^n column subsets and is limited to n <= 20 (got n = " +
                        std::to_string(a.cols()) + "); use sigma_tilde_min_upper_bound for larger matrices");
    }
    const auto columns = detail::column_major(a);
    std::vector<double> work(columns);
    const auto full = spectral::singular_values_inplace(work, a.rows(), a.cols());
    if (full.front() == 0.0) {
        throw error(errc::zero_vector, "sigma_tilde_min of a zero matrix");
    }
    // Full column rank: deleting columns cannot lower sigma_min (interlacing),
    // so the whole matrix attains the minimum.
    if (a.rows() >= a.cols() && full.back() > kSingularZeroThreshold * full.front()) {
        return full.back();
    }
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t subsets = std::uint64_t{1} << a.cols();
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
        const double s = detail::subset_sigma_min(columns, a.rows(), mask, work);
        if (s > 0.0) {
            best = std::min(best, s);
        }
    }
    if (!std::isfinite(best)) {
        throw error(errc::zero_vector, "sigma_tilde_min of a zero matrix");
    }
    return best;
}

/// Minimum over `samples` random column subsets (every singleton is always
/// included). The result is an upper bound on the true sigma-tilde.
[[nodiscard]] inline double sigma_tilde_min_upper_bound(const RowMatrix& a, std::size_t samples, std::uint64_t seed) {
    const auto columns = detail::column_major(a);
    std::vector<double> work;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t rows = a.rows();
    const auto consider = [&](const std::vector<std::size_t>& picked) {
        work.clear();
        for (std::size_t j : picked) {
            work.insert(work.end(), columns.begin() + static_cast<std::ptrdiff_t>(j * rows),
                        columns.begin() + static_cast<std::ptrdiff_t>((j + 1) * rows));
        }
        const auto sigma = spectral::singular_values_inplace(work, rows, picked.size());
        const double s = spectral::smallest_nonzero(sigma, kSingularZeroThreshold);
        if (s > 0.0) {
            best = std::min(best, s);
        }
    };
    for (std::size_t j = 0; j < a.cols(); ++j) {
        consider({j});
    }
    SeededRng rng(seed);
    std::vector<std::size_t> picked;
    for (std::size_t s = 0; s < samples; ++s) {
        picked.clear();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (rng.uniform() < 0.5) {
                picked.push_back(j);
            }
        }
        if (!picked.empty()) {
            consider(picked);
        }
    }
    if (!std::isfinite(best)) {
        throw error(errc::zero_vector, "sigma_tilde_min of a zero matrix");
    }
    return best;
}

/// Smallest nonzero magnitude of x.
[[nodiscard]] inline double min_nonzero_magnitude(std::span<const double> x) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : x) {
        if (v != 0.0) {
            best = std::min(best, std::abs(v));
        }
    }
    if (!std::isfinite(best)) {
        throw error(errc::zero_vector, "the solution x_hat is zero");
    }
    return best;
}

struct TheoryReport {
    double sigma_tilde_min = 0.0;
    double x_hat_min = 0.0;
    double q_wrask_lower = 0.0;  // WRaSK factor with the infimum replaced by its lower bound 1/m
    std::vector<std::pair<double, double>> ratio_samples;  // (p, ratio(A z, p))
    double q_rask = 0.0;
};

/// Contraction factors of the noiseless bounds on a row-normalized A.
///
/// q_rask = 1 - 0.5 * sigma^2 / ||A||_F^2 * xmin / (xmin + 2 lambda) and
/// q_wrask_lower is the weighted factor with inf_z ratio(Az) replaced by 1/m.
/// With ||A||_F^2 = m the two coincide. `z_samples` feed ratio(A z, p) as
/// empirical evidence of how far the true infimum sits above 1/m.
[[nodiscard]] inline TheoryReport contraction_factors(const RowMatrix& a, std::span<const double> x_hat, double lambda,
                                                      double p, const std::vector<Vector>& z_samples = {},
                                                      std::optional<double> sigma_override = std::nullopt) {
    require_lambda(lambda);
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "contraction_factors needs 0 < p < infinity");
    }
    if (!rows_are_normalized(a, 1e-10)) {
        throw error(errc::invalid_argument, "contraction_factors needs unit-norm rows");
    }
    if (x_hat.size() != a.cols()) {
        throw error(errc::dimension_mismatch, "contraction_factors: x_hat has wrong length");
    }
    TheoryReport report;
    report.x_hat_min = min_nonzero_magnitude(x_hat);
    report.sigma_tilde_min = sigma_override ? *sigma_override : sigma_tilde_min(a);
    const double sigma_sq = report.sigma_tilde_min * report.sigma_tilde_min;
    const double shrink_factor = report.x_hat_min / (report.x_hat_min + 2.0 * lambda);
    const auto m = static_cast<double>(a.rows());
    report.q_wrask_lower = 1.0 - 0.5 * sigma_sq * shrink_factor / m;
    report.q_rask = 1.0 - 0.5 * (sigma_sq / a.frobenius_norm_sq()) * shrink_factor;
    for (const auto& z : z_samples) {
        const Vector az = multiply(a, z);
        if (norm_inf(az) > 0.0) {
            report.ratio_samples.emplace_back(p, ratio(az, p));
        }
    }
    return report;
}

struct NoiseBoundInputs {
    double delta = 0.0;         // ||b_delta - b||_{p+2} <= delta
    double c_equiv = 1.0;       // norm-equivalence constant between ||.||_p and ||.||_{p+2}
    double a_norm_mixed = 1.0;  // stands in for ||A||_{1,p+2}
};

/// m^{2/(p(p+2))}: from ||x||_p^p <= ||x||_{p+2}^p * m^{2/(p+2)}.
[[nodiscard]] inline double default_norm_equivalence(std::size_t m, double p) {
    return std::pow(static_cast<double>(m), 2.0 / (p * (p + 2.0)));
}

/// max_i ||a_i||_1; the mixed norm in the exact-step noisy bound is otherwise undefined.
[[nodiscard]] inline double default_mixed_norm(const RowMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        best = std::max(best, norm1(a.row(i)));
    }
    return best;
}

/// Right-hand side of the noisy-data error bound after k iterations:
///   q^{k/2} sqrt(2 lambda ||x||_1 + ||x||_2^2) + delta sqrt(c^p q / (1-q))
/// for the inexact step, and with delta^2 replaced by delta^2 + 4 lambda ||A||_{1,p+2} delta
/// under the square root for the exact step.
[[nodiscard]] inline double noisy_bound(std::span<const double> x_hat, double lambda, double q, double k,
                                        const NoiseBoundInputs& inputs, double p, StepKind variant) {
    require_lambda(lambda);
    if (!(q < 1.0) || !(q >= 0.0)) {
        throw error(errc::degenerate_q, "the contraction factor must lie in [0, 1), got " + std::to_string(q));
    }
    if (!(inputs.delta >= 0.0) || !(inputs.c_equiv > 0.0) || !(inputs.a_norm_mixed >= 0.0) || !(k >= 0.0)) {
        throw error(errc::invalid_argument, "noisy_bound: invalid inputs");
    }
    const double start = std::sqrt(2.0 * lambda * norm1(x_hat) + dot(x_hat, x_hat));
    const double transient = std::pow(q, 0.5 * k) * start;
    const double tail = std::pow(inputs.c_equiv, p) * q / (1.0 - q);
    double noise_sq = inputs.delta * inputs.delta;
    if (variant == StepKind::exact) {
        noise_sq += 4.0 * lambda * inputs.a_norm_mixed * inputs.delta;
    }
    return transient + std::sqrt(noise_sq * tail);
}

struct OracleOptions {
    double gradient_tol = 1e-10;
    std::size_t max_iters = 20'000'000;
    std::size_t power_iters = 500;
};

/// Largest squared singular value of A by power iteration on A^T A.
[[nodiscard]] inline double spectral_norm_sq(const RowMatrix& a, std::size_t iters = 500) {
    SeededRng rng(0x5eed);
    Vector v(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        v[j] = 1.0 + 0.1 * rng.normal();
    }
    double estimate = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        const double v_norm = norm2(v);
        if (v_norm == 0.0) {
            return 0.0;
        }
        for (double& x : v) {
            x /= v_norm;
        }
        Vector w = multiply_transpose(a, multiply(a, v));
        const double next = dot(v, w);
        v = std::move(w);
        if (std::abs(next - estimate) <= 1e-14 * next) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    return estimate;
}

/// Solution of the augmented basis pursuit problem by fixed-step gradient
/// ascent on its smooth dual g(y) = b^T y - 0.5 ||S_lambda(A^T y)||^2,
/// x = S_lambda(A^T y). Independent of every Kaczmarz code path.
[[nodiscard]] inline Vector solve_oracle(const RowMatrix& a, std::span<const double> b, double lambda,
                                         const OracleOptions& options = {}) {
    require_lambda(lambda);
    if (b.size() != a.rows()) {
        throw error(errc::dimension_mismatch, "solve_oracle: b has wrong length");
    }
    const double lipschitz = spectral_norm_sq(a, options.power_iters);
    if (!(lipschitz > 0.0)) {
        throw error(errc::zero_vector, "solve_oracle: A is zero");
    }
    const double step = 1.0 / lipschitz;
    std::vector<double> y(a.rows(), 0.0);
    std::vector<double> x(a.cols(), 0.0);
    std::vector<double> grad(a.rows(), 0.0);
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const auto row = a.row(i);
            for (std::size_t j = 0; j < a.cols(); ++j) {
                x[j] += y[i] * row[j];
            }
        }
        for (double& v : x) {
            v = shrink(v, lambda);
        }
        double grad_sq = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            grad[i] = b[i] - dot(a.row(i), x);
            grad_sq += grad[i] * grad[i];
        }
        if (std::sqrt(grad_sq) <= options.gradient_tol) {
            return Vector(std::move(x));
        }
        for (std::size_t i = 0; i < a.rows(); ++i) {
            y[i] += step * grad[i];
        }
    }
    throw error(errc::not_converged, "solve_oracle: dual ascent did not reach the gradient tolerance");
}

}  // namespace wrask::theory

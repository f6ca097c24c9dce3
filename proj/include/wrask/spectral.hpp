#pragma once

// Small dense singular value routine (one-sided Jacobi) used by the
// sigma-tilde enumeration. Accurate for tiny singular values, which is what
// rank detection on column subsets needs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wrask::spectral {

/// Singular values of the rows x cols matrix whose columns are stored
/// contiguously in `columns` (column-major). The buffer is overwritten.
/// Returned in descending order.
[[nodiscard]] inline std::vector<double> singular_values_inplace(std::span<double> columns, std::size_t rows,
                                                                std::size_t cols, int max_sweeps = 80) {
    const auto col = [&](std::size_t j) { return columns.subspan(j * rows, rows); };
    std::vector<double> sq_norms(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (double v : col(j)) {
            s += v * v;
        }
        sq_norms[j] = s;
    }

    constexpr double kTol = 1e-15;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                const double alpha = sq_norms[p];
                const double beta = sq_norms[q];
                if (alpha == 0.0 || beta == 0.0) {
                    continue;
                }
                auto cp = col(p);
                auto cq = col(q);
                double gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    gamma += cp[i] * cq[i];
                }
                if (std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                double new_alpha = 0.0;
                double new_beta = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double u = cp[i];
                    const double v = cq[i];
                    cp[i] = c * u - s * v;
                    cq[i] = s * u + c * v;
                    new_alpha += cp[i] * cp[i];
                    new_beta += cq[i] * cq[i];
                }
                sq_norms[p] = new_alpha;
                sq_norms[q] = new_beta;
            }
        }
        if (!rotated) {
            break;
        }
    }

    std::vector<double> sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        sigma[j] = std::sqrt(sq_norms[j]);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

/// Smallest singular value above `rel_zero * sigma_max`, or 0 for a zero matrix.
[[nodiscard]] inline double smallest_nonzero(std::span<const double> sigma_desc, double rel_zero) {
    if (sigma_desc.empty() || sigma_desc.front() == 0.0) {
        return 0.0;
    }
    const double threshold = rel_zero * sigma_desc.front();
    double best = sigma_desc.front();
    for (double s : sigma_desc) {
        if (s > threshold) {
            best = std::min(best, s);
        }
    }
    return best;
}

}  // namespace wrask::spectral

#pragma once

// The augmented l1 function f(x) = lambda*||x||_1 + 0.5*||x||_2^2 and the
// Bregman machinery built on it: soft shrinkage (the gradient of f*),
// subgradients, Bregman distances and the exact Bregman projection onto a
// hyperplane.

#include "wrask/core_la.hpp"
#include "wrask/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace wrask {

/// Regularization weight of the augmented l1 function.
class AugL1 {
public:
    constexpr AugL1() = default;
    explicit AugL1(double lambda) : lambda_(lambda) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw error(errc::invalid_argument, "lambda must be a finite nonnegative number");
        }
    }
    [[nodiscard]] constexpr double lambda() const noexcept { return lambda_; }

private:
    double lambda_ = 0.0;
};

inline void require_lambda(double lambda) { (void)AugL1(lambda); }

/// Primal iterate x together with the dual iterate x* it was shrunk from.
struct PrimalDualPair {
    Vector x;
    Vector x_star;
};

[[nodiscard]] inline double shrink(double v, double lambda) noexcept {
    if (v > lambda) {
        return v - lambda;
    }
    if (v < -lambda) {
        return v + lambda;
    }
    return 0.0;
}

inline void soft_shrink_into(std::span<const double> v, double lambda, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = shrink(v[i], lambda);
    }
}

[[nodiscard]] inline Vector soft_shrink(std::span<const double> v, double lambda) {
    require_lambda(lambda);
    Vector out(v.size());
    soft_shrink_into(v, lambda, out.span());
    return out;
}

/// f*(v) = 0.5 * ||S_lambda(v)||^2.
[[nodiscard]] inline double conjugate_value(std::span<const double> v, double lambda) {
    require_lambda(lambda);
    double sum = 0.0;
    for (double x : v) {
        const double s = shrink(x, lambda);
        sum += s * s;
    }
    return 0.5 * sum;
}

[[nodiscard]] inline double augmented_l1_value(std::span<const double> x, double lambda) {
    return lambda * norm1(x) + 0.5 * dot(x, x);
}

/// x + lambda*s with s_i = sign(x_i), choosing s_i = 0 where x_i = 0.
[[nodiscard]] inline Vector subgradient(std::span<const double> x, double lambda) {
    require_lambda(lambda);
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
        out[i] = x[i] + lambda * sign;
    }
    return out;
}

inline constexpr double kDualAdmissibilityTol = 1e-8;

/// D_f^{x*}(x, y) = 0.5*||y - x||^2 + lambda*(||y||_1 - <s, y>), with s = (x* - x)/lambda.
[[nodiscard]] inline double bregman_distance(std::span<const double> x, std::span<const double> x_star,
                                             std::span<const double> y, double lambda) {
    require_lambda(lambda);
    if (x.size() != x_star.size() || x.size() != y.size()) {
        throw error(errc::dimension_mismatch, "bregman_distance: x, x* and y differ in length");
    }
    double quad = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double gap = std::abs(x[i] - shrink(x_star[i], lambda));
        if (gap > kDualAdmissibilityTol) {
            throw error(errc::inadmissible_dual, "x differs from S_lambda(x*) by " + std::to_string(gap) +
                                                     " at index " + std::to_string(i));
        }
        const double diff = y[i] - x[i];
        quad += diff * diff;
        if (lambda > 0.0) {
            const double s = (x_star[i] - x[i]) / lambda;
            if (std::abs(s) > 1.0 + 1e-10) {
                throw error(errc::inadmissible_dual, "|s_i| exceeds 1 at index " + std::to_string(i));
            }
            linear += std::abs(y[i]) - s * y[i];
        }
    }
    return 0.5 * quad + lambda * linear;
}

namespace detail {

/// phi'(t) = beta - <a, S_lambda(x* - t a)>; continuous, nondecreasing, piecewise linear.
[[nodiscard]] inline double line_search_derivative(std::span<const double> x_star, std::span<const double> a,
                                                   double beta, double lambda, double t) noexcept {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] != 0.0) {
            sum += a[j] * shrink(x_star[j] - t * a[j], lambda);
        }
    }
    return beta - sum;
}

}  // namespace detail

/// phi(t) = f*(x* - t a) + t*beta, the objective of the exact Bregman step.
[[nodiscard]] inline double line_search_objective(std::span<const double> x_star, std::span<const double> a,
                                                  double beta, double lambda, double t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double s = shrink(x_star[j] - t * a[j], lambda);
        sum += s * s;
    }
    return 0.5 * sum + t * beta;
}

/// Minimizer of phi(t) = 0.5*||S_lambda(x* - t a)||^2 + t*beta.
///
/// phi' is piecewise linear with kinks at t = (x*_j -/+ lambda)/a_j. The kinks
/// are sorted and the one segment holding the sign change of phi' is located by
/// binary search; on that segment phi' is affine and its root is solved in
/// closed form from the active coordinates. When phi' vanishes on a whole
/// interval (beta = 0 and no coordinate is active there) the interval midpoint
/// is returned.
[[nodiscard]] inline double exact_step(std::span<const double> x_star, std::span<const double> a, double beta,
                                       double lambda) {
    require_lambda(lambda);
    if (x_star.size() != a.size()) {
        throw error(errc::dimension_mismatch, "exact_step: x* and a differ in length");
    }
    const double a_sq = dot(a, a);
    if (a_sq == 0.0) {
        throw error(errc::invalid_argument, "exact_step: a must be nonzero");
    }
    if (lambda == 0.0) {
        return (dot(a, x_star) - beta) / a_sq;
    }

    // Flat minimizing interval: every coordinate stays inside [-lambda, lambda].
    if (beta == 0.0) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == 0.0) {
                continue;
            }
            double t1 = (x_star[j] - lambda) / a[j];
            double t2 = (x_star[j] + lambda) / a[j];
            if (t1 > t2) {
                std::swap(t1, t2);
            }
            lo = std::max(lo, t1);
            hi = std::min(hi, t2);
        }
        if (lo <= hi) {
            return 0.5 * (lo + hi);
        }
    }

    std::vector<double> kinks;
    kinks.reserve(2 * a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] != 0.0) {
            kinks.push_back((x_star[j] - lambda) / a[j]);
            kinks.push_back((x_star[j] + lambda) / a[j]);
        }
    }
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

    const auto derivative = [&](double t) { return detail::line_search_derivative(x_star, a, beta, lambda, t); };

    // First kink where phi' >= 0; the root sits on the segment ending there.
    std::size_t lo_idx = 0;
    std::size_t hi_idx = kinks.size();
    while (lo_idx < hi_idx) {
        const std::size_t mid = lo_idx + (hi_idx - lo_idx) / 2;
        if (derivative(kinks[mid]) >= 0.0) {
            hi_idx = mid;
        } else {
            lo_idx = mid + 1;
        }
    }
    const std::size_t seg = lo_idx;
    const double left = seg == 0 ? -std::numeric_limits<double>::infinity() : kinks[seg - 1];
    const double right = seg == kinks.size() ? std::numeric_limits<double>::infinity() : kinks[seg];

    double probe = 0.0;
    if (seg == 0) {
        probe = kinks.front() - 1.0;
    } else if (seg == kinks.size()) {
        probe = kinks.back() + 1.0;
    } else {
        probe = 0.5 * (left + right);
    }

    // On the segment: phi'(t) = beta - sum_active a_j (x*_j - sigma_j*lambda) + t * sum_active a_j^2.
    double slope = 0.0;
    double offset = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0.0) {
            continue;
        }
        const double v = x_star[j] - probe * a[j];
        if (v > lambda) {
            slope += a[j] * a[j];
            offset += a[j] * (x_star[j] - lambda);
        } else if (v < -lambda) {
            slope += a[j] * a[j];
            offset += a[j] * (x_star[j] + lambda);
        }
    }
    if (slope == 0.0) {
        return right;
    }
    const double t = (offset - beta) / slope;
    return std::clamp(t, left, right);
}

}  // namespace wrask

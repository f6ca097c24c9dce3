#pragma once

// Reference computations for the test suite. Each is written from the
// mathematical definition and shares no code path with the library beyond
// the container types.

#include "wrask/core_la.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline double soft(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

/// phi'(t) = beta - <a, S(x* - t a)>, nondecreasing in t.
inline double line_derivative(std::span<const double> x_star, std::span<const double> a, double beta, double lambda,
                              double t) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < a.size(); ++j) {
        s += static_cast<long double>(a[j]) * soft(x_star[j] - t * a[j], lambda);
    }
    return beta - static_cast<double>(s);
}

inline double line_objective(std::span<const double> x_star, std::span<const double> a, double beta, double lambda,
                             double t) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const long double v = soft(x_star[j] - t * a[j], lambda);
        s += v * v;
    }
    return static_cast<double>(0.5L * s) + t * beta;
}

/// Minimizer of phi by bisection on phi'. If phi' vanishes on an interval the
/// midpoint of that interval is returned.
inline double bisection_step(std::span<const double> x_star, std::span<const double> a, double beta, double lambda) {
    const auto d = [&](double t) { return line_derivative(x_star, a, beta, lambda, t); };
    double lo = -1.0;
    double hi = 1.0;
    while (d(lo) >= 0.0) lo *= 2.0;
    while (d(hi) <= 0.0) hi *= 2.0;
    // left end: boundary of {phi' < 0}
    double l0 = lo;
    double l1 = hi;
    for (int it = 0; it < 400 && l1 - l0 > 0.0; ++it) {
        const double mid = 0.5 * (l0 + l1);
        if (mid <= l0 || mid >= l1) break;
        (d(mid) < 0.0 ? l0 : l1) = mid;
    }
    // right end: boundary of {phi' <= 0}
    double r0 = lo;
    double r1 = hi;
    for (int it = 0; it < 400 && r1 - r0 > 0.0; ++it) {
        const double mid = 0.5 * (r0 + r1);
        if (mid <= r0 || mid >= r1) break;
        (d(mid) <= 0.0 ? r0 : r1) = mid;
    }
    return 0.5 * (0.5 * (l0 + l1) + 0.5 * (r0 + r1));
}

/// Exact selection probabilities of the partially weighted loop, by
/// recursion over every draw sequence.
inline std::vector<double> partially_weighted_distribution(const std::vector<double>& abs_r) {
    const std::size_t m = abs_r.size();
    std::vector<double> prob(m, 0.0);
    std::function<void(std::size_t, std::vector<bool>&, std::size_t, double)> walk =
        [&](std::size_t candidate, std::vector<bool>& used, std::size_t remaining, double weight) {
            if (remaining == 0) {
                prob[candidate] += weight;
                return;
            }
            const double each = weight / static_cast<double>(remaining);
            for (std::size_t u = 0; u < m; ++u) {
                if (used[u]) continue;
                if (abs_r[candidate] > abs_r[u]) {
                    prob[candidate] += each;
                } else {
                    used[u] = true;
                    walk(u, used, remaining - 1, each);
                    used[u] = false;
                }
            }
        };
    for (std::size_t first = 0; first < m; ++first) {
        std::vector<bool> used(m, false);
        used[first] = true;
        walk(first, used, m - 1, 1.0 / static_cast<double>(m));
    }
    return prob;
}

/// Number of eigenvalues of the symmetric matrix g (k x k) below mu, from the
/// signs of the pivots of an LDL^T factorization of g - mu I (Sylvester).
inline std::size_t count_below(const std::vector<long double>& g, std::size_t k, long double mu) {
    std::vector<long double> w(g);
    for (std::size_t i = 0; i < k; ++i) w[i * k + i] -= mu;
    std::size_t negative = 0;
    for (std::size_t p = 0; p < k; ++p) {
        long double pivot = w[p * k + p];
        if (pivot == 0.0L) pivot = -std::numeric_limits<long double>::epsilon() * (1.0L + std::fabs(mu));
        if (pivot < 0.0L) ++negative;
        for (std::size_t i = p + 1; i < k; ++i) {
            const long double f = w[i * k + p] / pivot;
            for (std::size_t j = p + 1; j < k; ++j) w[i * k + j] -= f * w[p * k + j];
        }
    }
    return negative;
}

/// Eigenvalues (ascending) of a symmetric PSD matrix by bisection on the inertia count.
inline std::vector<long double> psd_eigenvalues(const std::vector<long double>& g, std::size_t k) {
    long double upper = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
        long double row = 0.0L;
        for (std::size_t j = 0; j < k; ++j) row += std::fabs(g[i * k + j]);
        upper = std::max(upper, row);
    }
    upper = upper * 1.01L + 1e-300L;
    std::vector<long double> eig(k);
    for (std::size_t idx = 0; idx < k; ++idx) {
        long double lo = -1e-30L - 1e-18L * upper;
        long double hi = upper;
        for (int it = 0; it < 200; ++it) {
            const long double mid = 0.5L * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (count_below(g, k, mid) > idx ? hi : lo) = mid;
        }
        eig[idx] = 0.5L * (lo + hi);
    }
    return eig;
}

/// Subset enumeration with singular values from eigenvalues of A_J^T A_J.
/// Singular values below `rel_zero * sigma_max(A_J)` count as zero.
inline double sigma_tilde_min(const wrask::RowMatrix& a, double rel_zero = 1e-8) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j)
            if ((mask >> j) & 1U) cols.push_back(j);
        const std::size_t k = cols.size();
        std::vector<long double> g(k * k, 0.0L);
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = 0; q < k; ++q) {
                long double s = 0.0L;
                for (std::size_t i = 0; i < m; ++i)
                    s += static_cast<long double>(a(i, cols[p])) * static_cast<long double>(a(i, cols[q]));
                g[p * k + q] = s;
            }
        const auto eig = psd_eigenvalues(g, k);
        const long double top = std::sqrt(std::max(eig.back(), 0.0L));
        if (top == 0.0L) continue;
        for (long double e : eig) {
            const long double s = std::sqrt(std::max(e, 0.0L));
            if (s > rel_zero * top) {
                best = std::min(best, static_cast<double>(s));
                break;
            }
        }
    }
    return best;
}

/// Bregman distance straight from the definition f(y) - f(x) - <x*, y - x>.
inline double bregman(std::span<const double> x, std::span<const double> x_star, std::span<const double> y,
                      double lambda) {
    const auto f = [lambda](std::span<const double> v) {
        long double s = 0.0L;
        for (double e : v) s += lambda * std::fabs(e) + 0.5L * e * e;
        return s;
    };
    long double inner = 0.0L;
    for (std::size_t j = 0; j < x.size(); ++j) inner += static_cast<long double>(x_star[j]) * (y[j] - x[j]);
    return static_cast<double>(f(y) - f(x) - inner);
}

// ---------------------------------------------------------------- random data

inline std::vector<double> gaussian(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> dist;
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    return v;
}

inline wrask::RowMatrix gaussian_matrix(std::mt19937_64& gen, std::size_t m, std::size_t n) {
    return {m, n, gaussian(gen, m * n)};
}

inline wrask::RowMatrix unit_rows(std::mt19937_64& gen, std::size_t m, std::size_t n) {
    auto data = gaussian(gen, m * n);
    for (std::size_t i = 0; i < m; ++i) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(data[i * n + j]) * data[i * n + j];
        const double norm = static_cast<double>(std::sqrt(s));
        for (std::size_t j = 0; j < n; ++j) data[i * n + j] /= norm;
    }
    return {m, n, std::move(data)};
}

/// Rows with `support` entries of +-1/sqrt(support) (support a power of 4): exact unit norm in floating point.
inline wrask::RowMatrix exact_unit_rows(std::mt19937_64& gen, std::size_t m, std::size_t n, std::size_t support) {
    const double value = 1.0 / std::sqrt(static_cast<double>(support));
    std::vector<double> data(m * n, 0.0);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), gen);
        for (std::size_t s = 0; s < support; ++s) data[i * n + idx[s]] = (gen() & 1U) ? value : -value;
    }
    return {m, n, std::move(data)};
}

inline std::vector<double> sparse_vector(std::mt19937_64& gen, std::size_t n, std::size_t sparsity) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), gen);
    std::normal_distribution<double> dist;
    std::vector<double> x(n, 0.0);
    for (std::size_t s = 0; s < sparsity; ++s) {
        double v = 0.0;
        while (v == 0.0) v = dist(gen);
        x[idx[s]] = v;
    }
    return x;
}

inline std::vector<double> apply(const wrask::RowMatrix& a, std::span<const double> x) {
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < a.cols(); ++j) s += static_cast<long double>(a(i, j)) * x[j];
        out[i] = static_cast<double>(s);
    }
    return out;
}

/// Least-squares residual of projecting v onto the row space of A
/// (normal equations in long double with Cholesky; A must have full row rank).
inline double row_space_distance(const wrask::RowMatrix& a, std::span<const double> v) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<long double> g(m * m, 0.0L);
    std::vector<long double> rhs(m, 0.0L);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            long double s = 0.0L;
            for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(a(i, j)) * a(k, j);
            g[i * m + k] = s;
        }
        long double s = 0.0L;
        for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(a(i, j)) * v[j];
        rhs[i] = s;
    }
    // Cholesky solve
    for (std::size_t p = 0; p < m; ++p) {
        long double d = g[p * m + p];
        for (std::size_t k = 0; k < p; ++k) d -= g[p * m + k] * g[p * m + k];
        d = std::sqrt(d);
        g[p * m + p] = d;
        for (std::size_t i = p + 1; i < m; ++i) {
            long double s = g[i * m + p];
            for (std::size_t k = 0; k < p; ++k) s -= g[i * m + k] * g[p * m + k];
            g[i * m + p] = s / d;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        long double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= g[i * m + k] * rhs[k];
        rhs[i] = s / g[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        long double s = rhs[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= g[k * m + i] * rhs[k];
        rhs[i] = s / g[i * m + i];
    }
    long double dist = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        long double proj = 0.0L;
        for (std::size_t i = 0; i < m; ++i) proj += rhs[i] * a(i, j);
        const long double d = v[j] - proj;
        dist += d * d;
    }
    return static_cast<double>(std::sqrt(dist));
}

}  // namespace oracle

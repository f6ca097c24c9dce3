#pragma once

// Synthetic problems: Gaussian matrices with a sparse Gaussian ground truth,
// plus additive noise scaled to a prescribed (p+2)-norm.

#include "wrask/bregman.hpp"
#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/problem.hpp"
#include "wrask/rng.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace wrask {

/// Sparse ground truth: `sparsity` positions chosen uniformly without
/// replacement, standard-normal values, exact zeros re-drawn.
[[nodiscard]] inline Vector sparse_gaussian_vector(std::size_t n, std::size_t sparsity, SeededRng& rng) {
    if (sparsity < 1 || sparsity > n) {
        throw error(errc::invalid_sparsity,
                    "sparsity " + std::to_string(sparsity) + " must lie in [1, " + std::to_string(n) + "]");
    }
    std::vector<std::size_t> positions(n);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t s = 0; s < sparsity; ++s) {
        std::swap(positions[s], positions[s + rng.uniform_index(n - s)]);
    }
    Vector x(n);
    for (std::size_t s = 0; s < sparsity; ++s) {
        double v = 0.0;
        while (v == 0.0) {
            v = rng.normal();
        }
        x[positions[s]] = v;
    }
    return x;
}

/// Consistent problem on a given matrix: rows are normalized (zero rows
/// dropped), a sparse Gaussian x_hat is drawn and b = A x_hat.
[[nodiscard]] inline Problem problem_from_matrix(const RowMatrix& a, std::size_t sparsity, double lambda,
                                                 std::uint64_t seed) {
    SeededRng rng(seed);
    Vector x_hat = sparse_gaussian_vector(a.cols(), sparsity, rng);
    NormalizedSystem sys = normalize_rows(a, Vector(a.rows()));
    Vector b = multiply(sys.a, x_hat);
    return Problem{std::move(sys.a), std::move(b), std::move(x_hat), lambda, std::nullopt, true};
}

[[nodiscard]] inline Problem gen_gaussian_problem(std::size_t m, std::size_t n, std::size_t sparsity, double lambda,
                                                  std::uint64_t seed) {
    if (m == 0 || n == 0) {
        throw error(errc::invalid_argument, "gen_gaussian_problem: m and n must be positive");
    }
    if (sparsity < 1 || sparsity > n) {
        throw error(errc::invalid_sparsity,
                    "sparsity " + std::to_string(sparsity) + " must lie in [1, " + std::to_string(n) + "]");
    }
    require_lambda(lambda);
    SeededRng rng(seed);
    std::vector<double> entries(m * n);
    for (double& v : entries) {
        v = rng.normal();
    }
    RowMatrix raw(m, n, std::move(entries));
    Vector x_hat = sparse_gaussian_vector(n, sparsity, rng);
    NormalizedSystem sys = normalize_rows(raw, Vector(m));
    Vector b = multiply(sys.a, x_hat);
    return Problem{std::move(sys.a), std::move(b), std::move(x_hat), lambda, std::nullopt, true};
}

/// b <- b + r with Gaussian r rescaled so that ||r||_{p+2} = delta.
[[nodiscard]] inline Problem add_noise(Problem problem, double delta, double p, std::uint64_t seed) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw error(errc::invalid_argument, "add_noise: delta must be positive and finite");
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw error(errc::invalid_argument, "add_noise: p must be nonnegative and finite");
    }
    SeededRng rng(seed);
    std::vector<double> r(problem.b.size());
    double scale = 0.0;
    while (scale == 0.0) {
        for (double& v : r) {
            v = rng.normal();
        }
        scale = lp_norm(r, p + 2.0);
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
        problem.b[i] += r[i] * (delta / scale);
    }
    problem.noise_delta = delta;
    return problem;
}

}  // namespace wrask

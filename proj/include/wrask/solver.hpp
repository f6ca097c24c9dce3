#pragma once

// Iteration engine for the randomized sparse Kaczmarz family:
//
//   x*_{k+1} = x*_k - t_k a_{i_k},   x_{k+1} = S_lambda(x*_{k+1}),
//
// started from x_0 = x*_0 = 0 on a row-normalized system. The row i_k comes
// from a SamplingRule and t_k is either the inexact step <a_i, x_k> - b_i or
// the exact Bregman projection step.

#include "wrask/bregman.hpp"
#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/problem.hpp"
#include "wrask/rng.hpp"
#include "wrask/sampling.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wrask {

enum class StepKind { inexact, exact };

enum class StopReason { error_tol, residual_tol, max_iters, exactly_solved };

constexpr std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::error_tol: return "ErrorTol";
        case StopReason::residual_tol: return "ResidualTol";
        case StopReason::max_iters: return "MaxIters";
        case StopReason::exactly_solved: return "ExactlySolved";
    }
    return "Unknown";
}

struct SolverConfig {
    SamplingRule rule = SamplingRule::row_norm();
    StepKind step = StepKind::inexact;
    double lambda = 1.0;
    std::size_t max_iters = 200000;
    double tol_error = 0.0;     // stop once ||x - x_hat|| / ||x_hat|| < tol_error; 0 disables, needs x_hat
    double tol_residual = 0.0;  // stop once ||A x - b|| / ||b|| < tol_residual; 0 disables
    std::uint64_t seed = 0;
    std::size_t record_every = 1;
    // Past this iteration records thin out geometrically (ratio `record_growth`); 0 keeps the uniform stride.
    std::size_t dense_record_limit = 0;
    double record_growth = 1.05;
};

struct IterationRecord {
    std::size_t k = 0;
    std::optional<std::size_t> row;  // row drawn at iteration k; empty on the final record
    double rel_residual = 0.0;
    std::optional<double> rel_error;
    std::optional<double> bregman_dist;
    double elapsed_s = 0.0;
};

struct RunHistory {
    std::vector<IterationRecord> records;
    StopReason stop_reason = StopReason::max_iters;
};

struct SolveResult {
    Vector x;
    Vector x_star;
    RunHistory history;
    std::size_t iterations_used = 0;
    bool auto_normalized = false;
    double seconds = 0.0;
};

/// Passed to the optional observer after every update.
struct IterationView {
    std::size_t k;                    // iteration that produced the update
    std::size_t row;                  // i_k
    double row_residual;              // <a_{i_k}, x_k> - b_{i_k}
    double step;                      // t_k
    std::span<const double> x;        // x_{k+1}
    std::span<const double> x_star;   // x*_{k+1}
};

using IterationObserver = std::function<void(const IterationView&)>;

/// t = <a, x> - beta; assumes ||a||_2 = 1.
[[nodiscard]] inline double inexact_step_size(std::span<const double> a, std::span<const double> x, double beta) {
    if (a.size() != x.size()) {
        throw error(errc::dimension_mismatch, "inexact_step_size: a and x differ in length");
    }
    return dot(a, x) - beta;
}

/// x*+ = x* - t a, x+ = S_lambda(x*+).
[[nodiscard]] inline PrimalDualPair kaczmarz_iterate(const PrimalDualPair& state, std::span<const double> a,
                                                     double t, double lambda) {
    require_lambda(lambda);
    if (state.x_star.size() != a.size() || state.x.size() != a.size()) {
        throw error(errc::dimension_mismatch, "kaczmarz_iterate: state and a differ in length");
    }
    if (t == 0.0) {
        return state;
    }
    PrimalDualPair next{Vector(a.size()), Vector(a.size())};
    for (std::size_t j = 0; j < a.size(); ++j) {
        next.x_star[j] = state.x_star[j] - t * a[j];
        next.x[j] = shrink(next.x_star[j], lambda);
    }
    return next;
}

namespace detail {

/// Decides which iterations get a history record. Must be queried with increasing k.
class RecordSchedule {
public:
    RecordSchedule(std::size_t every, std::size_t dense_limit, double growth)
        : every_(every), dense_limit_(dense_limit), growth_(growth), next_sparse_(dense_limit) {}

    bool due(std::size_t k) {
        if (dense_limit_ == 0 || k <= dense_limit_) {
            return k % every_ == 0;
        }
        if (k < next_sparse_) {
            return false;
        }
        const auto grown = static_cast<std::size_t>(std::ceil(static_cast<double>(k) * growth_));
        next_sparse_ = std::max(k + every_, grown);
        return true;
    }

private:
    std::size_t every_;
    std::size_t dense_limit_;
    double growth_;
    std::size_t next_sparse_;
};

inline void validate(const SolverConfig& config) {
    require_lambda(config.lambda);
    if (config.max_iters == 0) {
        throw error(errc::invalid_argument, "max_iters must be positive");
    }
    if (config.record_every == 0) {
        throw error(errc::invalid_argument, "record_every must be positive");
    }
    if (!(config.tol_error >= 0.0) || !(config.tol_residual >= 0.0)) {
        throw error(errc::invalid_argument, "tolerances must be nonnegative");
    }
    if (!(config.record_growth > 1.0)) {
        throw error(errc::invalid_argument, "record_growth must exceed 1");
    }
}

}  // namespace detail

/// Runs one Kaczmarz-type solve. Deterministic given (problem, config).
///
/// Stopping is checked at the top of every iteration in this order: relative
/// error (only with ground truth), relative residual, an exactly zero residual
/// vector, then the iteration cap. The returned history always ends with a
/// record of the final iterate.
[[nodiscard]] inline SolveResult solve(const Problem& problem, const SolverConfig& config,
                                       const IterationObserver& observer = {}) {
    detail::validate(config);
    if (problem.b.size() != problem.a.rows()) {
        throw error(errc::dimension_mismatch, "solve: b has wrong length");
    }
    if (problem.x_hat && problem.x_hat->size() != problem.a.cols()) {
        throw error(errc::dimension_mismatch, "solve: x_hat has wrong length");
    }
    if (config.tol_error > 0.0 && !problem.x_hat) {
        throw error(errc::invalid_argument, "an error tolerance needs the ground truth x_hat");
    }

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&start]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    std::optional<NormalizedSystem> normalized;
    if (!problem.normalized) {
        normalized = normalize_rows(problem.a, problem.b);
    }
    const RowMatrix& a = normalized ? normalized->a : problem.a;
    const Vector& b = normalized ? normalized->b : problem.b;
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const double lambda = config.lambda;

    const double b_norm = norm2(b);
    if (b_norm == 0.0) {
        throw error(errc::invalid_argument, "solve: b must be nonzero");
    }
    const Vector* x_hat = problem.x_hat ? &*problem.x_hat : nullptr;
    const double x_hat_norm = x_hat ? norm2(*x_hat) : 0.0;

    SolveResult result{Vector(n), Vector(n), {}, 0, normalized.has_value(), 0.0};
    Vector& x = result.x;
    Vector& x_star = result.x_star;

    SeededRng rng(config.seed);
    std::optional<RowNormSampler> row_norm_sampler;
    if (config.rule.kind() == SamplingKind::row_norm) {
        row_norm_sampler.emplace(a);
    }
    std::vector<double> residuals(m);
    std::vector<double> scratch;
    std::vector<std::size_t> pool;
    detail::RecordSchedule schedule(config.record_every, config.dense_record_limit, config.record_growth);
    const bool always_full_residual = config.rule.needs_full_residual() || config.tol_residual > 0.0;

    const auto rel_error = [&]() {
        double sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x[j] - (*x_hat)[j];
            sq += d * d;
        }
        return x_hat_norm > 0.0 ? std::sqrt(sq) / x_hat_norm : std::sqrt(sq);
    };
    const auto make_record = [&](std::size_t k, std::optional<std::size_t> row, double rel_res,
                                 std::optional<double> err) {
        IterationRecord rec;
        rec.k = k;
        rec.row = row;
        rec.rel_residual = rel_res;
        if (x_hat) {
            rec.rel_error = err ? *err : rel_error();
            rec.bregman_dist = bregman_distance(x, x_star, *x_hat, lambda);
        }
        rec.elapsed_s = elapsed();
        return rec;
    };

    std::size_t k = 0;
    for (;;) {
        const bool record_now = schedule.due(k);
        const bool have_residual = always_full_residual || record_now;
        double rel_res = 0.0;
        if (have_residual) {
            residual_into(a, x, b, residuals);
            rel_res = norm2(residuals) / b_norm;
        }
        std::optional<double> err;
        if (x_hat && config.tol_error > 0.0) {
            err = rel_error();
            if (*err < config.tol_error) {
                result.history.stop_reason = StopReason::error_tol;
                break;
            }
        }
        if (config.tol_residual > 0.0 && rel_res < config.tol_residual) {
            result.history.stop_reason = StopReason::residual_tol;
            break;
        }
        if (have_residual && norm_inf(residuals) == 0.0) {
            result.history.stop_reason = StopReason::exactly_solved;
            break;
        }
        if (k == config.max_iters) {
            result.history.stop_reason = StopReason::max_iters;
            break;
        }

        const auto row_residual_at = [&](std::size_t i) {
            return have_residual ? residuals[i] : dot(a.row(i), x) - b[i];
        };

        std::size_t row = 0;
        switch (config.rule.kind()) {
            case SamplingKind::row_norm:
                row = (*row_norm_sampler)(rng);
                break;
            case SamplingKind::weighted:
                row = sample_weighted(residuals, config.rule.p(), rng, scratch);
                break;
            case SamplingKind::greedy:
                row = sample_greedy(residuals);
                break;
            case SamplingKind::partially_weighted:
                row = select_partially_weighted(
                    m, [&](std::size_t i) { return std::abs(row_residual_at(i)); }, rng, pool);
                break;
        }

        if (record_now) {
            result.history.records.push_back(make_record(k, row, rel_res, err));
        }

        const auto a_row = a.row(row);
        const double row_residual = row_residual_at(row);
        const double t = config.step == StepKind::inexact ? row_residual : exact_step(x_star, a_row, b[row], lambda);
        if (!std::isfinite(t)) {
            throw error(errc::non_finite_iterate, "step size became non-finite at iteration " + std::to_string(k));
        }
        if (t != 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                x_star[j] -= t * a_row[j];
                x[j] = shrink(x_star[j], lambda);
            }
            if (!std::isfinite(norm_inf(x_star))) {
                throw error(errc::non_finite_iterate, "dual iterate became non-finite at iteration " +
                                                          std::to_string(k));
            }
        }
        if (observer) {
            observer(IterationView{k, row, row_residual, t, x.span(), x_star.span()});
        }
        ++k;
    }

    double final_res = 0.0;
    {
        residual_into(a, x, b, residuals);
        final_res = norm2(residuals) / b_norm;
    }
    result.history.records.push_back(make_record(k, std::nullopt, final_res, std::nullopt));
    result.iterations_used = k;
    result.seconds = elapsed();
    return result;
}

}  // namespace wrask

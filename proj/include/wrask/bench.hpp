#pragma once

// Multi-trial benchmark: every method runs on every trial problem, then the
// report takes medians across trials (iteration counts, wall time and the
// recorded error/residual curves).

#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/generate.hpp"
#include "wrask/problem.hpp"
#include "wrask/rng.hpp"
#include "wrask/sampling.hpp"
#include "wrask/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace wrask {

struct MethodSpec {
    std::string name;
    SamplingRule rule = SamplingRule::row_norm();
    StepKind step = StepKind::inexact;
    std::optional<double> lambda;  // overrides BenchSpec::lambda (e.g. 0 for plain Kaczmarz)
};

struct GeneratorSpec {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t sparsity = 0;
};

struct BenchSpec {
    // Exactly one source: a Gaussian generator, or a fixed matrix with fresh sparse x_hat per trial.
    std::optional<GeneratorSpec> generator;
    std::optional<RowMatrix> matrix;
    std::size_t matrix_sparsity = 0;

    double lambda = 1.0;
    std::vector<MethodSpec> methods;
    std::size_t trials = 60;
    double tol_error = 1e-3;
    double tol_residual = 0.0;
    std::size_t max_iters = 200000;
    std::uint64_t master_seed = 0;
    bool paired = true;  // one problem per trial, shared by all methods

    // Noisy data: delta = noise_relative * ||b||_{noise_p + 2}.
    std::optional<double> noise_relative;
    double noise_p = 2.0;

    std::size_t record_every = 1;
    std::size_t dense_record_limit = 1000;
    double record_growth = 1.05;
    bool keep_histories = true;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct TrialResult {
    std::size_t method = 0;
    std::size_t trial = 0;
    bool failed = false;
    std::string failure;
    std::size_t iterations = 0;
    double seconds = 0.0;
    StopReason stop_reason = StopReason::max_iters;
    std::vector<IterationRecord> records;
};

struct CurvePoint {
    std::size_t k = 0;
    double median_residual = 0.0;
    std::optional<double> median_error;
};

struct MethodSummary {
    std::string name;
    double median_it = 0.0;
    double median_seconds = 0.0;
    std::size_t dnc_count = 0;     // trials that hit max_iters
    std::size_t failed_count = 0;  // trials aborted by a solver error
    bool median_dnc = false;       // median run hit the cap: shown as "-"
    std::vector<CurvePoint> curves;
};

struct BenchReport {
    std::size_t trials = 0;
    std::size_t max_iters = 0;
    std::vector<MethodSummary> methods;
    std::vector<TrialResult> runs;  // method-major, then trial
};

/// Median with the even-count convention (mean of the two middle values).
[[nodiscard]] inline double median(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

inline constexpr std::uint64_t kProblemStream = 0x70726f626c656dULL;
inline constexpr std::uint64_t kSolverStream = 0x736f6c766572ULL;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

/// Seed of the trial problem. Paired designs share it across methods.
[[nodiscard]] inline std::uint64_t problem_seed(const BenchSpec& spec, std::size_t method, std::size_t trial) {
    const std::uint64_t stream = spec.paired ? kProblemStream : derive_seed(kProblemStream, method, 0);
    return derive_seed(spec.master_seed, stream, trial);
}

/// Seed of the solver RNG: shared by all methods at a given trial.
[[nodiscard]] inline std::uint64_t solver_seed(const BenchSpec& spec, std::size_t trial) {
    return derive_seed(spec.master_seed, kSolverStream, trial);
}

[[nodiscard]] inline Problem make_trial_problem(const BenchSpec& spec, std::size_t method, std::size_t trial) {
    const std::uint64_t seed = problem_seed(spec, method, trial);
    Problem problem = spec.generator
                          ? gen_gaussian_problem(spec.generator->m, spec.generator->n, spec.generator->sparsity,
                                                 spec.lambda, seed)
                          : problem_from_matrix(*spec.matrix, spec.matrix_sparsity, spec.lambda, seed);
    if (spec.noise_relative) {
        const double delta = *spec.noise_relative * lp_norm(problem.b, spec.noise_p + 2.0);
        problem = add_noise(std::move(problem), delta, spec.noise_p, derive_seed(seed, kNoiseStream, 0));
    }
    return problem;
}

namespace detail {

inline void validate(const BenchSpec& spec) {
    if (spec.trials < 1) {
        throw error(errc::invalid_argument, "bench: trials must be at least 1");
    }
    if (spec.methods.empty()) {
        throw error(errc::invalid_argument, "bench: no methods given");
    }
    if (spec.generator.has_value() == spec.matrix.has_value()) {
        throw error(errc::invalid_argument, "bench: give exactly one of a generator or a matrix");
    }
    if (spec.noise_relative && !(*spec.noise_relative > 0.0)) {
        throw error(errc::invalid_argument, "bench: relative noise level must be positive");
    }
}

/// Value of a run's curve at iteration k: its last record at or before k.
/// Runs that stopped earlier contribute their final record.
class CurveCursor {
public:
    explicit CurveCursor(const std::vector<IterationRecord>& records) : records_(records) {}

    const IterationRecord& at(std::size_t k) {
        while (pos_ + 1 < records_.size() && records_[pos_ + 1].k <= k) {
            ++pos_;
        }
        return records_[pos_];
    }

private:
    const std::vector<IterationRecord>& records_;
    std::size_t pos_ = 0;
};

inline std::vector<CurvePoint> median_curves(const std::vector<const TrialResult*>& runs) {
    std::vector<std::size_t> grid;
    for (const auto* run : runs) {
        for (const auto& rec : run->records) {
            grid.push_back(rec.k);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<CurveCursor> cursors;
    cursors.reserve(runs.size());
    for (const auto* run : runs) {
        cursors.emplace_back(run->records);
    }
    std::vector<CurvePoint> curves;
    curves.reserve(grid.size());
    std::vector<double> res;
    std::vector<double> err;
    for (std::size_t k : grid) {
        res.clear();
        err.clear();
        for (auto& cursor : cursors) {
            const auto& rec = cursor.at(k);
            res.push_back(rec.rel_residual);
            if (rec.rel_error) {
                err.push_back(*rec.rel_error);
            }
        }
        CurvePoint point{k, median(res), std::nullopt};
        if (err.size() == res.size()) {
            point.median_error = median(err);
        }
        curves.push_back(point);
    }
    return curves;
}

}  // namespace detail

[[nodiscard]] inline TrialResult run_trial(const BenchSpec& spec, std::size_t method, std::size_t trial) {
    TrialResult out;
    out.method = method;
    out.trial = trial;
    try {
        const Problem problem = make_trial_problem(spec, method, trial);
        const MethodSpec& m = spec.methods[method];
        SolverConfig config;
        config.rule = m.rule;
        config.step = m.step;
        config.lambda = m.lambda ? *m.lambda : spec.lambda;
        config.max_iters = spec.max_iters;
        config.tol_error = spec.tol_error;
        config.tol_residual = spec.tol_residual;
        config.seed = solver_seed(spec, trial);
        config.record_every = spec.record_every;
        config.dense_record_limit = spec.dense_record_limit;
        config.record_growth = spec.record_growth;
        SolveResult result = solve(problem, config);
        out.iterations = result.iterations_used;
        out.seconds = result.seconds;
        out.stop_reason = result.history.stop_reason;
        out.records = std::move(result.history.records);
    } catch (const std::exception& e) {
        out.failed = true;
        out.failure = e.what();
    }
    return out;
}

/// Runs methods x trials (concurrently) and reduces them in a fixed order,
/// so the report does not depend on scheduling.
[[nodiscard]] inline BenchReport run_bench(const BenchSpec& spec) {
    detail::validate(spec);
    const std::size_t methods = spec.methods.size();
    const std::size_t tasks = methods * spec.trials;
    std::vector<TrialResult> runs(tasks);

    std::size_t threads = spec.threads != 0 ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, tasks);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t task = next.fetch_add(1); task < tasks; task = next.fetch_add(1)) {
            runs[task] = run_trial(spec, task / spec.trials, task % spec.trials);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    BenchReport report;
    report.trials = spec.trials;
    report.max_iters = spec.max_iters;
    for (std::size_t method = 0; method < methods; ++method) {
        MethodSummary summary;
        summary.name = spec.methods[method].name;
        std::vector<double> iterations;
        std::vector<double> seconds;
        std::vector<const TrialResult*> completed;
        for (std::size_t trial = 0; trial < spec.trials; ++trial) {
            const TrialResult& run = runs[method * spec.trials + trial];
            if (run.failed) {
                ++summary.failed_count;
                continue;
            }
            if (run.stop_reason == StopReason::max_iters) {
                ++summary.dnc_count;
            }
            iterations.push_back(static_cast<double>(run.iterations));
            seconds.push_back(run.seconds);
            completed.push_back(&run);
        }
        if (!completed.empty()) {
            summary.median_it = median(iterations);
            summary.median_seconds = median(seconds);
            summary.median_dnc = summary.median_it >= static_cast<double>(spec.max_iters);
            summary.curves = detail::median_curves(completed);
        } else {
            summary.median_it = std::numeric_limits<double>::quiet_NaN();
            summary.median_seconds = std::numeric_limits<double>::quiet_NaN();
            summary.median_dnc = true;
        }
        report.methods.push_back(std::move(summary));
    }
    if (!spec.keep_histories) {
        for (auto& run : runs) {
            run.records.clear();
            run.records.shrink_to_fit();
        }
    }
    report.runs = std::move(runs);
    return report;
}

}  // namespace wrask

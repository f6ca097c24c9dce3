#include "oracles.hpp"
#include "wrask/solver.hpp"
#include "wrask/theory.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using wrask::errc;
using wrask::Problem;
using wrask::RowMatrix;
using wrask::SamplingRule;
using wrask::SolverConfig;
using wrask::StepKind;
using wrask::StopReason;
using wrask::Vector;

namespace {

template <class F>
errc error_code_of(F&& f) {
    try {
        f();
    } catch (const wrask::error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a wrask::error";
    return errc::invalid_argument;
}

Problem consistent(const RowMatrix& a, const std::vector<double>& x_hat, double lambda) {
    return Problem{a, Vector(oracle::apply(a, x_hat)), Vector(x_hat), lambda, std::nullopt, true};
}

SolverConfig config(SamplingRule rule, StepKind step, double lambda, std::size_t iters, std::uint64_t seed) {
    SolverConfig c;
    c.rule = rule;
    c.step = step;
    c.lambda = lambda;
    c.max_iters = iters;
    c.seed = seed;
    return c;
}

const std::vector<SamplingRule>& all_rules() {
    static const std::vector<SamplingRule> rules{SamplingRule::row_norm(), SamplingRule::weighted(2.0),
                                                 SamplingRule::weighted(10.0), SamplingRule::greedy(),
                                                 SamplingRule::partially_weighted()};
    return rules;
}

}  // namespace

TEST(InexactStepSize, Examples) {
    EXPECT_EQ(wrask::inexact_step_size(Vector{1, 0}, Vector{3, 4}, 0.0), 3.0);
    EXPECT_EQ(wrask::inexact_step_size(Vector{0.6, 0.8}, Vector{1, 1}, 1.4), 0.0);
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(wrask::inexact_step_size(Vector{h, h}, Vector{1, 1}, 0.0), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(error_code_of([] { (void)wrask::inexact_step_size(Vector{1, 0}, Vector{1}, 0.0); }),
              errc::dimension_mismatch);
}

TEST(KaczmarzIterate, Examples) {
    const wrask::PrimalDualPair zero{Vector{0, 0}, Vector{0, 0}};
    const auto next = wrask::kaczmarz_iterate(zero, Vector{1, 0}, -3.0, 1.0);
    EXPECT_EQ(next.x_star, (Vector{3, 0}));
    EXPECT_EQ(next.x, (Vector{2, 0}));

    const wrask::PrimalDualPair state{Vector{0.5, 0}, Vector{1.5, -0.2}};
    const auto same = wrask::kaczmarz_iterate(state, Vector{0.6, 0.8}, 0.0, 1.0);
    EXPECT_EQ(same.x, state.x);
    EXPECT_EQ(same.x_star, state.x_star);
}

TEST(KaczmarzIterate, LambdaZeroIsOrthogonalProjection) {
    std::mt19937_64 gen(2);
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = oracle::unit_rows(gen, 1, 6);
        const auto x = oracle::gaussian(gen, 6);
        const double beta = oracle::gaussian(gen, 1)[0];
        const wrask::PrimalDualPair state{Vector(x), Vector(x)};
        const double t = wrask::inexact_step_size(a.row(0), x, beta);
        const auto next = wrask::kaczmarz_iterate(state, a.row(0), t, 0.0);
        EXPECT_NEAR(wrask::dot(a.row(0), next.x), beta, 1e-12 * (1 + std::abs(beta)));
        // the move is parallel to a
        for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(x[j] - next.x[j], t * a(0, j), 1e-14);
    }
}

TEST(Solve, LambdaZeroRowNormIsClassicalKaczmarz) {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 10; ++rep) {
        const RowMatrix a = oracle::exact_unit_rows(gen, 30, 16, 4);
        const auto x_hat = oracle::gaussian(gen, 16);
        const Problem problem = consistent(a, x_hat, 0.0);
        const std::uint64_t seed = 100 + rep;
        const auto result = wrask::solve(problem, config(SamplingRule::row_norm(), StepKind::inexact, 0.0, 500, seed));

        // classical projection x <- x - (<a_i, x> - b_i) a_i on the same row stream
        wrask::SeededRng rng(seed);
        const wrask::RowNormSampler sampler(a);
        std::vector<double> x(16, 0.0);
        for (std::size_t k = 0; k < 500; ++k) {
            const std::size_t i = sampler(rng);
            const double t = wrask::dot(a.row(i), x) - problem.b[i];
            for (std::size_t j = 0; j < 16; ++j) x[j] -= t * a(i, j);
        }
        EXPECT_EQ(result.iterations_used, 500U);
        EXPECT_EQ(result.x, Vector(x));
        EXPECT_EQ(result.x_star, Vector(x));
    }
}

TEST(Solve, ExactStepAtLambdaZeroMatchesInexact) {
    std::mt19937_64 gen(4);
    const RowMatrix a = oracle::exact_unit_rows(gen, 20, 16, 16);
    const Problem problem = consistent(a, oracle::gaussian(gen, 16), 0.0);
    for (const auto& rule : all_rules()) {
        const auto inexact = wrask::solve(problem, config(rule, StepKind::inexact, 0.0, 300, 9));
        const auto exact = wrask::solve(problem, config(rule, StepKind::exact, 0.0, 300, 9));
        EXPECT_EQ(inexact.x, exact.x);
        EXPECT_EQ(inexact.iterations_used, exact.iterations_used);
    }
}

TEST(Solve, WeightedRuleWithEqualResidualsDrawsLikeRowNorm) {
    // At x_0 = 0 the residual is -b; equal magnitudes make the first weighted draw uniform.
    const RowMatrix a{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.6, 0.8, 0}, {0, 0.6, -0.8}};
    const Problem problem{a, Vector{2, -2, 2, 2, -2}, std::nullopt, 1.0, std::nullopt, true};
    std::vector<std::size_t> weighted(5, 0);
    std::vector<std::size_t> uniform(5, 0);
    const std::size_t draws = 20000;
    for (std::size_t s = 0; s < draws; ++s) {
        const auto first_row = [&](SamplingRule rule) {
            std::size_t row = 99;
            (void)wrask::solve(problem, config(rule, StepKind::inexact, 1.0, 1, s),
                               [&](const wrask::IterationView& v) { row = v.row; });
            return row;
        };
        ++weighted[first_row(SamplingRule::weighted(3.0))];
        ++uniform[first_row(SamplingRule::row_norm())];
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const double expected = 0.5 * static_cast<double>(weighted[i] + uniform[i]);
        stat += std::pow(static_cast<double>(weighted[i]) - expected, 2) / expected;
        stat += std::pow(static_cast<double>(uniform[i]) - expected, 2) / expected;
    }
    // two-sample homogeneity test, 4 degrees of freedom
    const boost::math::chi_squared dist(4.0);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 1e-3);
    // matched seeds also give matched rows since both invert the same uniform
    EXPECT_EQ(weighted, uniform);
}

TEST(Solve, SmallExponentWeightsSelectRowNormIndices) {
    std::mt19937_64 gen(5);
    const RowMatrix a = oracle::unit_rows(gen, 40, 60);
    for (int rep = 0; rep < 200; ++rep) {
        auto r = oracle::gaussian(gen, 40);
        wrask::SeededRng r1(static_cast<std::uint64_t>(rep));
        wrask::SeededRng r2(static_cast<std::uint64_t>(rep));
        for (int k = 0; k < 50; ++k)
            EXPECT_EQ(wrask::sample_weighted(r, 1e-13, r1), wrask::sample_row_norm(a, r2));
    }
}

TEST(Solve, BregmanDistanceContractsEveryIteration) {
    std::mt19937_64 gen(6);
    for (double lambda : {0.0, 0.5, 2.0}) {
        const RowMatrix a = oracle::unit_rows(gen, 30, 60);
        const auto x_hat = oracle::sparse_vector(gen, 60, 5);
        const Problem problem = consistent(a, x_hat, lambda);
        for (const auto& rule : all_rules()) {
            for (StepKind step : {StepKind::inexact, StepKind::exact}) {
                double previous = oracle::bregman(std::vector<double>(60, 0.0), std::vector<double>(60, 0.0), x_hat,
                                                  lambda);
                int violations = 0;
                (void)wrask::solve(problem, config(rule, step, lambda, 400, 17),
                                   [&](const wrask::IterationView& v) {
                                       const double now = oracle::bregman(v.x, v.x_star, x_hat, lambda);
                                       if (now > previous - 0.5 * v.row_residual * v.row_residual + 1e-9) ++violations;
                                       previous = now;
                                   });
                EXPECT_EQ(violations, 0) << "lambda " << lambda << " step " << static_cast<int>(step);
            }
        }
    }
}

TEST(Solve, SeedDeterminism) {
    std::mt19937_64 gen(7);
    const RowMatrix a = oracle::unit_rows(gen, 25, 50);
    const Problem problem = consistent(a, oracle::sparse_vector(gen, 50, 4), 1.0);
    for (const auto& rule : all_rules()) {
        auto c = config(rule, StepKind::exact, 1.0, 300, 77);
        const auto r1 = wrask::solve(problem, c);
        const auto r2 = wrask::solve(problem, c);
        ASSERT_EQ(r1.history.records.size(), r2.history.records.size());
        for (std::size_t i = 0; i < r1.history.records.size(); ++i) {
            const auto& p = r1.history.records[i];
            const auto& q = r2.history.records[i];
            EXPECT_EQ(p.k, q.k);
            EXPECT_EQ(p.row, q.row);
            EXPECT_EQ(p.rel_residual, q.rel_residual);
            EXPECT_EQ(p.rel_error, q.rel_error);
            EXPECT_EQ(p.bregman_dist, q.bregman_dist);
        }
        EXPECT_EQ(r1.x, r2.x);
        EXPECT_EQ(r1.x_star, r2.x_star);
    }
}

TEST(Solve, DualIterateStaysInRowSpan) {
    std::mt19937_64 gen(8);
    const RowMatrix a = oracle::unit_rows(gen, 8, 20);
    const Problem problem = consistent(a, oracle::sparse_vector(gen, 20, 3), 1.0);
    for (const auto& rule : all_rules()) {
        for (StepKind step : {StepKind::inexact, StepKind::exact}) {
            const auto result = wrask::solve(problem, config(rule, step, 1.0, 200, 3));
            EXPECT_LE(oracle::row_space_distance(a, result.x_star), 1e-8 * (1.0 + wrask::norm2(result.x_star)));
        }
    }
}

TEST(Solve, PrimalIsShrunkDualAndHistoryIsWellFormed) {
    std::mt19937_64 gen(9);
    const RowMatrix a = oracle::unit_rows(gen, 20, 30);
    const Problem problem = consistent(a, oracle::sparse_vector(gen, 30, 3), 0.7);
    auto c = config(SamplingRule::weighted(4.0), StepKind::inexact, 0.7, 1000, 5);
    c.record_every = 10;
    const auto result = wrask::solve(problem, c);
    const Vector expected = wrask::soft_shrink(result.x_star, 0.7);
    for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(result.x[j], expected[j], 1e-10);

    const auto& records = result.history.records;
    ASSERT_FALSE(records.empty());
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        EXPECT_LT(records[i].k, records[i + 1].k);
        EXPECT_EQ(records[i].k % 10, 0U);
        EXPECT_TRUE(records[i].row.has_value());
    }
    for (const auto& r : records) {
        EXPECT_TRUE(std::isfinite(r.rel_residual));
        ASSERT_TRUE(r.rel_error && r.bregman_dist);
        EXPECT_TRUE(std::isfinite(*r.rel_error));
        EXPECT_TRUE(std::isfinite(*r.bregman_dist));
    }
    EXPECT_EQ(records.back().k, 1000U);
    EXPECT_FALSE(records.back().row.has_value());
    EXPECT_EQ(result.iterations_used, 1000U);
    EXPECT_EQ(result.history.stop_reason, StopReason::max_iters);
    // Bregman distance never increases along the recorded run
    for (std::size_t i = 0; i + 1 < records.size(); ++i)
        EXPECT_LE(*records[i + 1].bregman_dist, *records[i].bregman_dist + 1e-9);
}

TEST(Solve, DenseThenGeometricRecording) {
    std::mt19937_64 gen(10);
    const RowMatrix a = oracle::unit_rows(gen, 10, 12);
    const Problem problem = consistent(a, oracle::gaussian(gen, 12), 0.0);
    auto c = config(SamplingRule::row_norm(), StepKind::inexact, 0.0, 5000, 1);
    c.dense_record_limit = 100;
    c.record_growth = 1.5;
    const auto result = wrask::solve(problem, c);
    std::size_t dense = 0;
    std::size_t sparse = 0;
    for (const auto& r : result.history.records) (r.k <= 100 ? dense : sparse) += 1;
    EXPECT_EQ(dense, 101U);
    EXPECT_LT(sparse, 12U);
    EXPECT_EQ(result.iterations_used, 5000U);
}

TEST(Solve, StopReasons) {
    std::mt19937_64 gen(11);
    const RowMatrix a = oracle::unit_rows(gen, 20, 40);
    const Problem problem = consistent(a, oracle::sparse_vector(gen, 40, 3), 1.0);

    auto c = config(SamplingRule::weighted(2.0), StepKind::exact, 1.0, 100000, 2);
    c.tol_error = 1e-3;
    auto r = wrask::solve(problem, c);
    EXPECT_EQ(r.history.stop_reason, StopReason::error_tol);
    EXPECT_LT(*r.history.records.back().rel_error, 1e-3);

    c.tol_error = 0.0;
    c.tol_residual = 1e-4;
    r = wrask::solve(problem, c);
    EXPECT_EQ(r.history.stop_reason, StopReason::residual_tol);
    EXPECT_LT(r.history.records.back().rel_residual, 1e-4);

    c.tol_residual = 0.0;
    c.max_iters = 37;
    r = wrask::solve(problem, c);
    EXPECT_EQ(r.history.stop_reason, StopReason::max_iters);
    EXPECT_EQ(r.iterations_used, 37U);
}

TEST(Solve, ExactlySolvedSystem) {
    const Problem problem{RowMatrix{{1, 0}, {0, 1}}, Vector{1, 2}, std::nullopt, 0.0, std::nullopt, true};
    const auto r = wrask::solve(problem, config(SamplingRule::greedy(), StepKind::inexact, 0.0, 100, 0));
    EXPECT_EQ(r.history.stop_reason, StopReason::exactly_solved);
    EXPECT_EQ(r.iterations_used, 2U);
    EXPECT_EQ(r.x, (Vector{1, 2}));
}

TEST(Solve, ZeroResidualRowStillCounts) {
    const Problem problem{RowMatrix{{1, 0}, {0, 1}}, Vector{1, 0}, std::nullopt, 0.0, std::nullopt, true};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::size_t no_ops = 0;
        const auto r = wrask::solve(problem, config(SamplingRule::row_norm(), StepKind::inexact, 0.0, 1000, seed),
                                    [&](const wrask::IterationView& v) {
                                        if (v.step == 0.0) ++no_ops;
                                    });
        EXPECT_EQ(r.history.stop_reason, StopReason::exactly_solved);
        EXPECT_EQ(r.iterations_used, no_ops + 1);
    }
}

TEST(Solve, AutoNormalizesRows) {
    const RowMatrix scaled{{3, 4}, {0, 2}};
    Problem raw{scaled, Vector{7, 2}, Vector{1, 1}, 0.0, std::nullopt, false};
    const Problem unit{RowMatrix{{0.6, 0.8}, {0, 1}}, Vector{1.4, 1}, Vector{1, 1}, 0.0, std::nullopt, true};
    const auto c = config(SamplingRule::row_norm(), StepKind::inexact, 0.0, 50, 4);
    const auto r1 = wrask::solve(raw, c);
    const auto r2 = wrask::solve(unit, c);
    EXPECT_TRUE(r1.auto_normalized);
    EXPECT_FALSE(r2.auto_normalized);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(r1.x[j], r2.x[j], 1e-14);
}

TEST(Solve, Validation) {
    const Problem problem{RowMatrix{{1, 0}}, Vector{1}, std::nullopt, 1.0, std::nullopt, true};
    auto c = config(SamplingRule::row_norm(), StepKind::inexact, 1.0, 10, 0);
    auto bad = c;
    bad.max_iters = 0;
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(problem, bad); }), errc::invalid_argument);
    bad = c;
    bad.record_every = 0;
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(problem, bad); }), errc::invalid_argument);
    bad = c;
    bad.lambda = -1.0;
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(problem, bad); }), errc::invalid_argument);
    bad = c;
    bad.tol_error = 1e-3;
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(problem, bad); }), errc::invalid_argument);
    const Problem zero_b{RowMatrix{{1, 0}}, Vector{0}, std::nullopt, 1.0, std::nullopt, true};
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(zero_b, c); }), errc::invalid_argument);
    const Problem wrong{RowMatrix{{1, 0}}, Vector{1, 2}, std::nullopt, 1.0, std::nullopt, true};
    EXPECT_EQ(error_code_of([&] { (void)wrask::solve(wrong, c); }), errc::dimension_mismatch);
}

TEST(Solve, ConvergesToAugmentedBasisPursuitSolution) {
    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 5; ++rep) {
        const RowMatrix a = oracle::unit_rows(gen, 20, 40);
        const auto x_true = oracle::sparse_vector(gen, 40, 3);
        const Vector b(oracle::apply(a, x_true));
        const Vector reference = wrask::theory::solve_oracle(a, b, 1.0);
        const Problem problem{a, b, reference, 1.0, std::nullopt, true};
        auto c = config(SamplingRule::weighted(2.0), StepKind::exact, 1.0, 200000, 21);
        c.tol_error = 1e-6;
        const auto r = wrask::solve(problem, c);
        EXPECT_EQ(r.history.stop_reason, StopReason::error_tol);
        double diff = 0.0;
        for (std::size_t j = 0; j < 40; ++j) diff = std::max(diff, std::abs(r.x[j] - reference[j]));
        EXPECT_LE(diff, 1e-4);
    }
}

#pragma once

// wrask command line: gen / solve / bench / bound.
// Exit codes: 0 success (a run that hits max_iters included), 1 runtime failure, 2 usage error.

#include "wrask/wrask.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace wrask::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr const char* kOutDirEnv = "WRASK_OUT_DIR";

/// Thrown for flag combinations CLI11 cannot express; mapped to exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MethodChoice {
    SamplingRule rule = SamplingRule::row_norm();
    StepKind step = StepKind::inexact;
    bool zero_lambda = false;
};

inline const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names{"rk", "rask", "erask", "wrask", "ewrask", "pwrask", "greedy", "wrk"};
    return names;
}

/// Maps a method name to its sampling rule and step; `p` feeds the weighted rules.
inline MethodChoice method_choice(const std::string& name, double p) {
    if (name == "rk") return {SamplingRule::row_norm(), StepKind::inexact, true};
    if (name == "rask") return {SamplingRule::row_norm(), StepKind::inexact, false};
    if (name == "erask") return {SamplingRule::row_norm(), StepKind::exact, false};
    if (name == "wrask") return {SamplingRule::weighted(p), StepKind::inexact, false};
    if (name == "ewrask") return {SamplingRule::weighted(p), StepKind::exact, false};
    if (name == "pwrask") return {SamplingRule::partially_weighted(), StepKind::inexact, false};
    if (name == "greedy") return {SamplingRule::greedy(), StepKind::inexact, false};
    if (name == "wrk") return {SamplingRule::weighted(p), StepKind::inexact, true};
    throw UsageError("unknown method '" + name + "'");
}

inline bool method_uses_p(const std::string& name) {
    return name == "wrask" || name == "ewrask" || name == "wrk";
}

inline fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    throw UsageError(std::string("--out is required (or set ") + kOutDirEnv + ")");
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw error(errc::io_error, "cannot create directory '" + dir.string() + "': " + ec.message());
    }
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error(errc::io_error, "cannot write '" + path.string() + "'");
    }
    out << text;
}

inline ordered_json real_or_null(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? ordered_json(*v) : ordered_json(nullptr);
}

// ---------------------------------------------------------------- problem files

struct LoadedProblem {
    Problem problem;
    std::optional<double> manifest_lambda;
};

/// `spec` is a directory written by `gen` or "A.mtx,b.txt[,x_hat.txt]".
inline LoadedProblem load_problem(const std::string& spec) {
    fs::path a_path;
    fs::path b_path;
    std::optional<fs::path> x_path;
    std::optional<fs::path> manifest_path;
    if (fs::is_directory(spec)) {
        const fs::path dir(spec);
        a_path = dir / "A.mtx";
        b_path = dir / "b.txt";
        if (fs::exists(dir / "x_hat.txt")) {
            x_path = dir / "x_hat.txt";
        }
        if (fs::exists(dir / "manifest.json")) {
            manifest_path = dir / "manifest.json";
        }
    } else {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string part; std::getline(ss, part, ',');) {
            parts.push_back(part);
        }
        if (parts.size() == 1) {
            throw error(errc::io_error, "problem directory '" + spec + "' does not exist");
        }
        if (parts.size() > 3) {
            throw UsageError("--problem takes a directory or 'A.mtx,b.txt[,x_hat.txt]'");
        }
        a_path = parts[0];
        b_path = parts[1];
        if (parts.size() == 3) {
            x_path = parts[2];
        }
    }

    LoadedProblem loaded{Problem{io::read_matrix_market(a_path.string()), io::read_vector(b_path.string()),
                                 std::nullopt, 1.0, std::nullopt, false},
                         std::nullopt};
    if (loaded.problem.b.size() != loaded.problem.a.rows()) {
        throw error(errc::dimension_mismatch, "b has " + std::to_string(loaded.problem.b.size()) +
                                                  " entries but A has " + std::to_string(loaded.problem.a.rows()) +
                                                  " rows");
    }
    if (x_path) {
        loaded.problem.x_hat = io::read_vector(x_path->string());
        if (loaded.problem.x_hat->size() != loaded.problem.a.cols()) {
            throw error(errc::dimension_mismatch, "x_hat length does not match the columns of A");
        }
    }
    if (manifest_path) {
        std::ifstream in(*manifest_path);
        const auto manifest = ordered_json::parse(in, nullptr, false);
        if (manifest.is_discarded() || !manifest.is_object()) {
            throw error(errc::parse_error, "malformed manifest '" + manifest_path->string() + "'");
        }
        if (manifest.contains("lambda") && manifest["lambda"].is_number()) {
            loaded.manifest_lambda = manifest["lambda"].get<double>();
        }
        if (manifest.contains("noise_delta") && manifest["noise_delta"].is_number()) {
            loaded.problem.noise_delta = manifest["noise_delta"].get<double>();
        }
    }
    loaded.problem.normalized = rows_are_normalized(loaded.problem.a);
    return loaded;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t sparsity = 0;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> noise_delta;
    double p = 2.0;
    std::string out;
};

inline int cmd_gen(const GenOptions& opt, std::ostream& out) {
    if (opt.sparsity < 1 || opt.sparsity > opt.n) {
        throw UsageError("--sparsity must lie in [1, n]");
    }
    const fs::path dir = resolve_out_dir(opt.out);
    Problem problem = gen_gaussian_problem(opt.m, opt.n, opt.sparsity, opt.lambda, opt.seed);
    if (opt.noise_delta) {
        problem = add_noise(std::move(problem), *opt.noise_delta, opt.p, derive_seed(opt.seed, hash_label("noise"), 0));
    }
    ensure_dir(dir);
    io::write_matrix_market((dir / "A.mtx").string(), problem.a);
    io::write_vector((dir / "b.txt").string(), problem.b);
    io::write_vector((dir / "x_hat.txt").string(), *problem.x_hat);

    ordered_json manifest{
        {"generator", "gaussian"},
        {"m", opt.m},
        {"n", opt.n},
        {"sparsity", opt.sparsity},
        {"lambda", opt.lambda},
        {"seed", opt.seed},
        {"noise_delta", real_or_null(opt.noise_delta)},
        {"p", opt.noise_delta ? ordered_json(opt.p) : ordered_json(nullptr)},
        {"files", {{"A", "A.mtx"}, {"b", "b.txt"}, {"x_hat", "x_hat.txt"}}},
    };
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << (dir / "A.mtx").string() << ", b.txt, x_hat.txt, manifest.json\n";
    return kExitOk;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
    std::string problem;
    std::string method;
    double p = 2.0;
    std::optional<double> lambda;
    std::optional<std::string> step;
    std::size_t max_iters = 200000;
    double tol_error = 0.0;
    double tol_res = 0.0;
    std::uint64_t seed = 0;
    std::size_t record_every = 1;
    std::size_t dense_limit = 0;
    bool timing = false;
    std::string out;
};

inline int cmd_solve(const SolveOptions& opt, std::ostream& out) {
    const fs::path dir = resolve_out_dir(opt.out);
    LoadedProblem loaded = load_problem(opt.problem);
    const MethodChoice choice = method_choice(opt.method, opt.p);

    SolverConfig config;
    config.rule = choice.rule;
    config.step = choice.step;
    if (opt.step) {
        config.step = *opt.step == "exact" ? StepKind::exact : StepKind::inexact;
    }
    config.lambda = choice.zero_lambda ? 0.0 : opt.lambda.value_or(loaded.manifest_lambda.value_or(1.0));
    config.max_iters = opt.max_iters;
    config.tol_error = opt.tol_error;
    config.tol_residual = opt.tol_res;
    config.seed = opt.seed;
    config.record_every = opt.record_every;
    config.dense_record_limit = opt.dense_limit;
    if (config.tol_error > 0.0 && !loaded.problem.x_hat) {
        throw UsageError("--tol-error needs a ground-truth x_hat file");
    }
    loaded.problem.lambda = config.lambda;

    SolveResult result = solve(loaded.problem, config);
    if (!opt.timing) {
        for (auto& rec : result.history.records) {
            rec.elapsed_s = 0.0;
        }
    }
    const IterationRecord& last = result.history.records.back();
    ordered_json summary{
        {"it", result.iterations_used},
        {"stop_reason", std::string(to_string(result.history.stop_reason))},
        {"final_residual", last.rel_residual},
        {"final_error", real_or_null(last.rel_error)},
    };

    ensure_dir(dir);
    std::ostringstream csv;
    io::write_history_csv(csv, result.history);
    write_text(dir / "history.csv", csv.str());
    write_text(dir / "result.json", summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
    std::string preset;
    std::size_t trials = 60;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t threads = 0;
    bool unpaired = false;
    bool timing = false;
    std::optional<std::size_t> max_iters;
    std::optional<double> tol_error;
    std::optional<std::size_t> record_every;
    // custom
    std::optional<std::size_t> m;
    std::optional<std::size_t> n;
    std::optional<std::size_t> sparsity;
    std::optional<std::string> matrix;
    double lambda = 1.0;
    std::optional<std::string> methods;
    std::optional<double> noise_rel;
    double noise_p = 2.0;
};

/// "rask,wrask:10,greedy": each token is a method name with an optional ":p".
inline std::vector<MethodSpec> parse_method_list(const std::string& list, double default_p) {
    std::vector<MethodSpec> methods;
    std::stringstream ss(list);
    for (std::string token; std::getline(ss, token, ',');) {
        if (token.empty()) {
            continue;
        }
        std::string name = token;
        double p = default_p;
        if (const auto colon = token.find(':'); colon != std::string::npos) {
            name = token.substr(0, colon);
            try {
                std::size_t used = 0;
                p = std::stod(token.substr(colon + 1), &used);
                if (used != token.size() - colon - 1) {
                    throw std::invalid_argument("trailing characters");
                }
            } catch (const std::exception&) {
                throw UsageError("bad p in method '" + token + "'");
            }
            if (!method_uses_p(name)) {
                throw UsageError("method '" + name + "' takes no p");
            }
        }
        const MethodChoice choice = method_choice(name, p);
        methods.push_back({token, choice.rule, choice.step, choice.zero_lambda ? std::optional<double>(0.0) : std::nullopt});
    }
    if (methods.empty()) {
        throw UsageError("--methods lists no methods");
    }
    return methods;
}

inline BenchSpec bench_spec_from(const BenchOptions& opt) {
    BenchSpec spec;
    spec.trials = opt.trials;
    spec.master_seed = opt.seed;
    spec.paired = !opt.unpaired;
    spec.threads = opt.threads;
    if (opt.preset == "fig1") {
        const std::size_t m = 400;
        spec.generator = GeneratorSpec{m, 200, 25};
        spec.lambda = 1.0;
        spec.methods = {
            {"rask", SamplingRule::row_norm(), StepKind::inexact, std::nullopt},
            {"wrask_p1", SamplingRule::weighted(1.0), StepKind::inexact, std::nullopt},
            {"wrask_p_m80", SamplingRule::weighted(m / 80.0), StepKind::inexact, std::nullopt},
            {"wrask_p_m40", SamplingRule::weighted(m / 40.0), StepKind::inexact, std::nullopt},
            {"greedy", SamplingRule::greedy(), StepKind::inexact, std::nullopt},
        };
        spec.tol_error = 0.0;  // fixed budget: full curves
        spec.max_iters = 20000;
        spec.record_every = 50;
        spec.dense_record_limit = 0;
    } else if (opt.preset == "table2-small") {
        const std::size_t m = 400;
        spec.generator = GeneratorSpec{m, 100, 20};
        spec.lambda = 1.0;
        spec.methods = {
            {"erask", SamplingRule::row_norm(), StepKind::exact, std::nullopt},
            {"wrk", SamplingRule::weighted(m / 40.0), StepKind::inexact, 0.0},
            {"ewrask", SamplingRule::weighted(m / 40.0), StepKind::exact, std::nullopt},
        };
        spec.tol_error = 1e-3;
        spec.max_iters = 200000;
        spec.record_every = 10;
        spec.dense_record_limit = 1000;
    } else {
        const bool generated = opt.m && opt.n && opt.sparsity;
        const bool from_matrix = opt.matrix && opt.sparsity;
        if (generated == from_matrix) {
            throw UsageError("--preset custom needs --m --n --sparsity, or --matrix with --sparsity");
        }
        spec.lambda = opt.lambda;
        std::size_t m = 0;
        if (generated) {
            spec.generator = GeneratorSpec{*opt.m, *opt.n, *opt.sparsity};
            m = *opt.m;
        } else {
            spec.matrix = io::read_matrix_market(*opt.matrix);
            spec.matrix_sparsity = *opt.sparsity;
            m = spec.matrix->rows();
        }
        spec.methods = parse_method_list(opt.methods.value_or("erask,wrk,ewrask"), static_cast<double>(m) / 40.0);
        spec.tol_error = 1e-3;
        spec.max_iters = 200000;
        spec.record_every = 10;
        spec.dense_record_limit = 1000;
        spec.noise_relative = opt.noise_rel;
        spec.noise_p = opt.noise_p;
    }
    if (opt.max_iters) {
        spec.max_iters = *opt.max_iters;
    }
    if (opt.tol_error) {
        spec.tol_error = *opt.tol_error;
    }
    if (opt.record_every) {
        spec.record_every = *opt.record_every;
    }
    return spec;
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    const fs::path dir = resolve_out_dir(opt.out);
    const BenchSpec spec = bench_spec_from(opt);
    BenchReport report = run_bench(spec);

    io::write_bench_table(out, report);
    for (const auto& run : report.runs) {
        if (run.failed) {
            err << "trial " << run.trial << " of " << report.methods[run.method].name << " failed: " << run.failure
                << '\n';
        }
    }
    if (!opt.timing) {
        for (auto& summary : report.methods) {
            summary.median_seconds = 0.0;
        }
        for (auto& run : report.runs) {
            run.seconds = 0.0;
            for (auto& rec : run.records) {
                rec.elapsed_s = 0.0;
            }
        }
    }
    ensure_dir(dir);
    write_text(dir / "report.json", io::to_json(report).dump(2) + "\n");
    std::ostringstream csv;
    io::write_bench_csv(csv, report);
    write_text(dir / "curves.csv", csv.str());
    return kExitOk;
}

// ---------------------------------------------------------------- bound

struct BoundOptions {
    std::string problem;
    double p = 2.0;
    std::optional<double> lambda;
    std::optional<double> delta;
    std::optional<double> c;
    std::optional<double> a_mixed;
    std::string step = "inexact";
    std::size_t samples = 8;
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_bound(const BoundOptions& opt, std::ostream& out, std::ostream& err) {
    LoadedProblem loaded = load_problem(opt.problem);
    const double lambda = opt.lambda.value_or(loaded.manifest_lambda.value_or(1.0));
    require_lambda(lambda);
    NormalizedSystem sys = normalize_rows(loaded.problem.a, loaded.problem.b);
    if (sys.a.cols() > theory::kMaxEnumeratedColumns) {
        // Surface the guard before the (expensive) oracle solve.
        (void)theory::sigma_tilde_min(sys.a);
    }

    // The noiseless target is the minimizer of the regularized problem; with
    // noisy data the supplied ground truth stands in for it.
    Vector x_hat;
    std::string x_hat_source;
    if (loaded.problem.noise_delta && loaded.problem.x_hat) {
        x_hat = *loaded.problem.x_hat;
        x_hat_source = "ground truth file (noisy data)";
    } else {
        try {
            x_hat = theory::solve_oracle(sys.a, sys.b, lambda);
            x_hat_source = "dual ascent oracle";
            // Off-support entries just past the threshold are solver residue, not support.
            const double floor = 1e-8 * norm_inf(x_hat);
            for (double& v : x_hat) {
                if (std::abs(v) <= floor) {
                    v = 0.0;
                }
            }
        } catch (const error& e) {
            if (e.code() != errc::not_converged || !loaded.problem.x_hat) {
                throw;
            }
            x_hat = *loaded.problem.x_hat;
            x_hat_source = "ground truth file (oracle did not converge)";
        }
    }

    // z = x_k - x_hat along a short weighted run, as samples for the residual ratio.
    std::vector<Vector> z_samples;
    if (opt.samples > 0) {
        Problem run{sys.a, sys.b, std::nullopt, lambda, std::nullopt, true};
        SolverConfig config;
        config.rule = SamplingRule::weighted(opt.p);
        config.lambda = lambda;
        config.seed = opt.seed;
        config.max_iters = std::size_t{1} << opt.samples;
        config.record_every = config.max_iters;
        std::size_t next_sample = 0;
        const auto observer = [&](const IterationView& view) {
            if (view.k == next_sample) {
                Vector z(view.x.size());
                for (std::size_t j = 0; j < z.size(); ++j) {
                    z[j] = view.x[j] - x_hat[j];
                }
                z_samples.push_back(std::move(z));
                next_sample = next_sample == 0 ? 1 : 2 * next_sample;
            }
        };
        try {
            (void)solve(run, config, observer);
        } catch (const error& e) {
            err << "ratio sampling run stopped early: " << e.what() << '\n';
        }
    }

    const theory::TheoryReport report = theory::contraction_factors(sys.a, x_hat, lambda, opt.p, z_samples);
    ordered_json doc = io::to_json(report);
    doc["lambda"] = lambda;
    doc["p"] = opt.p;
    doc["x_hat_source"] = x_hat_source;
    doc["notes"] = ordered_json::array({
        "q_wrask_lower replaces the infimum of the residual ratio by its lower bound 1/m",
        "with unit rows ||A||_F^2 = m, so q_rask and q_wrask_lower coincide",
        "ratio_samples lists (p, ratio(A z, p)) for z = x_k - x_hat along a weighted run",
    });

    if (opt.delta) {
        theory::NoiseBoundInputs inputs;
        inputs.delta = *opt.delta;
        inputs.c_equiv = opt.c.value_or(theory::default_norm_equivalence(sys.a.rows(), opt.p));
        inputs.a_norm_mixed = opt.a_mixed.value_or(theory::default_mixed_norm(sys.a));
        const StepKind variant = opt.step == "exact" ? StepKind::exact : StepKind::inexact;
        const double q = report.q_wrask_lower;
        ordered_json points = ordered_json::array();
        for (double k : {0.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0}) {
            points.push_back(ordered_json::array({k, theory::noisy_bound(x_hat, lambda, q, k, inputs, opt.p, variant)}));
        }
        doc["noise"] = ordered_json{
            {"delta", inputs.delta},
            {"c", inputs.c_equiv},
            {"a_mixed", inputs.a_norm_mixed},
            {"variant", opt.step},
            {"q", q},
            {"bound", std::move(points)},
        };
    }

    const std::string text = doc.dump(2) + "\n";
    out << text;
    const std::string out_flag = opt.out.empty() ? std::string() : opt.out;
    if (!out_flag.empty()) {
        ensure_dir(out_flag);
        write_text(fs::path(out_flag) / "theory.json", text);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Randomized sparse Kaczmarz solvers with residual-weighted sampling"};
    app.name("wrask");
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a Gaussian test problem");
    gen_cmd->add_option("--m", gen.m, "Rows")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--n", gen.n, "Columns")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--sparsity", gen.sparsity, "Nonzeros in x_hat")->required();
    gen_cmd->add_option("--lambda", gen.lambda, "Regularization weight")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Seed");
    gen_cmd->add_option("--noise-delta", gen.noise_delta, "Noise level in the (p+2)-norm")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--p", gen.p, "Exponent for the noise norm")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--out", gen.out, "Output directory");

    SolveOptions sol;
    auto* solve_cmd = app.add_subcommand("solve", "Run one solver on a problem");
    solve_cmd->add_option("--problem", sol.problem, "Problem directory or A.mtx,b.txt[,x_hat.txt]")->required();
    solve_cmd->add_option("--method", sol.method, "Solver")->required()->check(CLI::IsMember(method_names()));
    solve_cmd->add_option("--p", sol.p, "Residual exponent of the weighted rules")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--lambda", sol.lambda, "Regularization weight")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--step", sol.step, "Override the step kind")->check(CLI::IsMember({"inexact", "exact"}));
    solve_cmd->add_option("--max-iters", sol.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--tol-error", sol.tol_error, "Relative error tolerance")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--tol-res", sol.tol_res, "Relative residual tolerance")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--seed", sol.seed, "Seed");
    solve_cmd->add_option("--record-every", sol.record_every, "History stride")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--dense-limit", sol.dense_limit, "Thin the history geometrically past this iteration");
    solve_cmd->add_flag("--timing", sol.timing, "Write wall-clock times into the history");
    solve_cmd->add_option("--out", sol.out, "Output directory");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Multi-trial comparison with median aggregation");
    bench_cmd->add_option("--preset", bench.preset, "Experiment")
        ->required()
        ->check(CLI::IsMember({"fig1", "table2-small", "custom"}));
    bench_cmd->add_option("--trials", bench.trials, "Trials per method")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Master seed");
    bench_cmd->add_option("--out", bench.out, "Output directory");
    bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores)");
    bench_cmd->add_flag("--unpaired", bench.unpaired, "Fresh problem per method and trial");
    bench_cmd->add_flag("--timing", bench.timing, "Write wall-clock times into report and curves");
    bench_cmd->add_option("--max-iters", bench.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--tol-error", bench.tol_error, "Relative error tolerance")->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--record-every", bench.record_every, "Curve stride")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--m", bench.m, "Rows (custom)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--n", bench.n, "Columns (custom)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--sparsity", bench.sparsity, "Nonzeros in x_hat (custom)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--matrix", bench.matrix, "Matrix Market file instead of a generator (custom)")
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--lambda", bench.lambda, "Regularization weight (custom)")->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--methods", bench.methods, "Comma list, e.g. rask,wrask:10,greedy (custom)");
    bench_cmd->add_option("--noise-rel", bench.noise_rel, "delta as a fraction of ||b||_{p+2} (custom)")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--noise-p", bench.noise_p, "p of the noise norm (custom)")->check(CLI::NonNegativeNumber);

    BoundOptions bound;
    auto* bound_cmd = app.add_subcommand("bound", "Evaluate the convergence constants of a problem");
    bound_cmd->add_option("--problem", bound.problem, "Problem directory or A.mtx,b.txt[,x_hat.txt]")->required();
    bound_cmd->add_option("--p", bound.p, "Residual exponent")->check(CLI::PositiveNumber);
    bound_cmd->add_option("--lambda", bound.lambda, "Regularization weight")->check(CLI::NonNegativeNumber);
    bound_cmd->add_option("--delta", bound.delta, "Noise level for the noisy bound")->check(CLI::NonNegativeNumber);
    bound_cmd->add_option("--c", bound.c, "Norm-equivalence constant")->check(CLI::PositiveNumber);
    bound_cmd->add_option("--a-mixed", bound.a_mixed, "Mixed matrix norm")->check(CLI::NonNegativeNumber);
    bound_cmd->add_option("--step", bound.step, "Variant of the noisy bound")->check(CLI::IsMember({"inexact", "exact"}));
    bound_cmd->add_option("--samples", bound.samples, "Ratio samples (at k = 0, 1, 2, 4, ...)");
    bound_cmd->add_option("--seed", bound.seed, "Seed of the sampling run");
    bound_cmd->add_option("--out", bound.out, "Also write theory.json here");

    const auto usage = [&app]() {
        const auto active = app.get_subcommands();
        return active.empty() ? app.help() : active.front()->help();
    };
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << usage();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << usage();
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (solve_cmd->parsed()) return cmd_solve(sol, out);
        if (bench_cmd->parsed()) return cmd_bench(bench, out, err);
        if (bound_cmd->parsed()) return cmd_bound(bound, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << usage();
        return kExitUsage;
    } catch (const error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace wrask::cli

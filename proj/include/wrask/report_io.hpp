#pragma once

// CSV and JSON persistence for solve histories, bench reports and theory reports.
// Missing values are written as empty CSV fields and JSON null.

#include "wrask/bench.hpp"
#include "wrask/matrix_market.hpp"
#include "wrask/solver.hpp"
#include "wrask/theory.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wrask::io {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string optional_real(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string{};
}

inline ordered_json real_or_null(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

inline ordered_json real_or_null(const std::optional<double>& v) {
    return v ? real_or_null(*v) : ordered_json(nullptr);
}

inline void write_record_fields(std::ostream& out, const IterationRecord& rec) {
    out << rec.k << ',';
    if (rec.row) {
        out << *rec.row;
    }
    out << ',' << format_real(rec.rel_residual) << ',' << optional_real(rec.rel_error) << ','
        << optional_real(rec.bregman_dist) << ',' << format_real(rec.elapsed_s) << '\n';
}

}  // namespace detail

inline constexpr const char* kHistoryHeader = "iter,row_index,rel_residual,rel_error,bregman_dist,elapsed_s";
inline constexpr const char* kBenchHeader = "method,trial,iter,row_index,rel_residual,rel_error,bregman_dist,elapsed_s";

inline void write_history_csv(std::ostream& out, const RunHistory& history) {
    out << kHistoryHeader << '\n';
    for (const auto& rec : history.records) {
        detail::write_record_fields(out, rec);
    }
}

inline void write_bench_csv(std::ostream& out, const BenchReport& report) {
    out << kBenchHeader << '\n';
    for (const auto& run : report.runs) {
        const std::string& name = report.methods[run.method].name;
        for (const auto& rec : run.records) {
            out << name << ',' << run.trial << ',';
            detail::write_record_fields(out, rec);
        }
    }
}

[[nodiscard]] inline ordered_json to_json(const BenchReport& report) {
    ordered_json methods = ordered_json::object();
    for (const auto& summary : report.methods) {
        ordered_json curves = ordered_json::array();
        for (const auto& point : summary.curves) {
            curves.push_back(ordered_json::array(
                {point.k, detail::real_or_null(point.median_residual), detail::real_or_null(point.median_error)}));
        }
        methods[summary.name] = ordered_json{
            {"median_it", detail::real_or_null(summary.median_it)},
            {"median_seconds", detail::real_or_null(summary.median_seconds)},
            {"dnc_count", summary.dnc_count},
            {"failed_count", summary.failed_count},
            {"curves", std::move(curves)},
        };
    }
    return methods;
}

[[nodiscard]] inline ordered_json to_json(const theory::TheoryReport& report) {
    ordered_json samples = ordered_json::array();
    for (const auto& [p, r] : report.ratio_samples) {
        samples.push_back(ordered_json::array({p, r}));
    }
    return ordered_json{
        {"sigma_tilde_min", report.sigma_tilde_min},
        {"x_hat_min", report.x_hat_min},
        {"q_rask", report.q_rask},
        {"q_wrask_lower", report.q_wrask_lower},
        {"ratio_samples", std::move(samples)},
    };
}

/// Table with one row per method: median IT and CPU seconds, "-" when the median run hit the cap.
inline void write_bench_table(std::ostream& out, const BenchReport& report) {
    std::size_t width = 6;
    for (const auto& summary : report.methods) {
        width = std::max(width, summary.name.size());
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %12s %12s %5s %6s\n", static_cast<int>(width), "method", "IT", "CPU",
                  "DNC", "failed");
    out << line;
    for (const auto& summary : report.methods) {
        std::string it = "-";
        std::string cpu = "-";
        if (!summary.median_dnc) {
            std::snprintf(line, sizeof line, "%.1f", summary.median_it);
            it = line;
            std::snprintf(line, sizeof line, "%.4f", summary.median_seconds);
            cpu = line;
        }
        std::snprintf(line, sizeof line, "%-*s %12s %12s %5zu %6zu\n", static_cast<int>(width), summary.name.c_str(),
                      it.c_str(), cpu.c_str(), summary.dnc_count, summary.failed_count);
        out << line;
    }
}

}  // namespace wrask::io

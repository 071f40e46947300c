#include "trainer/perf/compare.hpp"

#include <cmath>
#include <cstdio>

#include "trainer/error.hpp"

namespace trainer::perf {

double optimization_ratio(double before, double after, RatioDirection direction) {
    if (!(before > 0.0)) throw DomainError("baseline value must be > 0");
    const double change = direction == RatioDirection::Reduction ? before - after : after - before;
    const double rounded = std::round(1000.0 * change / before) / 10.0;
    return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

ComparisonReport compare_runs(const MetricsSummary& baseline, const MetricsSummary& optimized) {
    ComparisonReport report;
    const auto row = [&](const char* metric, const std::optional<double>& b, const std::optional<double>& a,
                         RatioDirection dir) {
        if (b && a) report.rows.push_back({metric, dir, *b, *a, optimization_ratio(*b, *a, dir)});
    };
    row("Maximum frame time (ms)", baseline.maximum_frame_time_ms, optimized.maximum_frame_time_ms,
        RatioDirection::Reduction);
    row("Average frame time (ms)", baseline.average_frame_time_ms, optimized.average_frame_time_ms,
        RatioDirection::Reduction);
    row("Average frame rate (fps)", baseline.average_frame_rate_fps, optimized.average_frame_rate_fps,
        RatioDirection::Increase);
    row("Maximum number of DrawCalls", baseline.draw_call_peak, optimized.draw_call_peak, RatioDirection::Reduction);
    row("Average number of DrawCalls", baseline.draw_call_average, optimized.draw_call_average,
        RatioDirection::Reduction);
    row("Peak of reserved memory (MB)", baseline.reserved_memory_peak_mb, optimized.reserved_memory_peak_mb,
        RatioDirection::Reduction);
    return report;
}

Json ComparisonReport::to_json() const {
    Json rows_json = Json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"metric", r.metric},
                             {"direction", r.direction == RatioDirection::Reduction ? "reduction" : "increase"},
                             {"before", r.before},
                             {"after", r.after},
                             {"ratio_percent", r.ratio}});
    }
    return Json{{"rows", std::move(rows_json)}};
}

std::string ComparisonReport::to_text() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %12s %12s %16s\n", "Metric", "Baseline", "Optimized", "Optimized ratio");
    out += line;
    for (const auto& r : rows) {
        char ratio[32];
        std::snprintf(ratio, sizeof ratio, "%.1f%% (%s)", r.ratio,
                      r.direction == RatioDirection::Reduction ? "down" : "up");
        std::snprintf(line, sizeof line, "%-30s %12.3f %12.3f %16s\n", r.metric.c_str(), r.before, r.after, ratio);
        out += line;
    }
    return out;
}

}  // namespace trainer::perf

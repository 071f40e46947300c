#pragma once

// Before/after optimization tables.

#include <string>
#include <vector>

#include "trainer/perf/frame.hpp"

namespace trainer::perf {

enum class RatioDirection { Reduction, Increase };

/// Percentage change rounded to one decimal. Throws DomainError when before <= 0.
double optimization_ratio(double before, double after, RatioDirection direction);

struct ComparisonRow {
    std::string metric;
    RatioDirection direction;
    double before;
    double after;
    double ratio;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;

    [[nodiscard]] Json to_json() const;
    [[nodiscard]] std::string to_text() const;
};

/// One row per metric present in both summaries.
ComparisonReport compare_runs(const MetricsSummary& baseline, const MetricsSummary& optimized);

}  // namespace trainer::perf

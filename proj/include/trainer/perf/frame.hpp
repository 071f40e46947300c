#pragma once

// Frame pacing under the three vertical-sync policies, and trace metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trainer/canonical_json.hpp"

namespace trainer::perf {

enum class VSync { DontSync, EveryVBlank, EverySecondVBlank };
const char* to_string(VSync v) noexcept;
/// "dontsync", "every", "everysecond".
VSync vsync_from_string(std::string_view text);

struct VSyncMode {
    VSync mode = VSync::EveryVBlank;
    double refresh_hz = 90.0;

    [[nodiscard]] double period_ms() const { return 1000.0 / refresh_hz; }
};

/// Per-frame cost in milliseconds; non-empty, every entry > 0.
class FrameTrace {
public:
    explicit FrameTrace(std::vector<double> times_ms);

    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }

    /// One float per line; blank lines and '#' comments are skipped.
    static FrameTrace parse(std::string_view text);
    [[nodiscard]] std::string to_text() const;

    friend bool operator==(const FrameTrace&, const FrameTrace&) = default;

private:
    std::vector<double> times_;
};

/// Displayed frame times. DontSync: t. EveryVBlank: R*ceil(t/R). EverySecondVBlank: 2R*ceil(t/2R).
FrameTrace pace(const FrameTrace& trace, VSyncMode vsync);

struct MetricsSummary {
    std::optional<double> average_frame_time_ms;
    std::optional<double> maximum_frame_time_ms;
    /// Mean of per-frame rates 1000/t.
    std::optional<double> average_frame_rate_fps;
    /// 1000 / mean frame time.
    std::optional<double> reciprocal_mean_fps;
    std::optional<double> draw_call_peak;
    std::optional<double> draw_call_average;
    std::optional<double> reserved_memory_peak_mb;

    [[nodiscard]] Json to_json() const;
    /// Throws DomainError when maximum < average or average <= 0.
    static MetricsSummary from_json(const Json& j);

    friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

MetricsSummary summarize(const FrameTrace& trace);

/// Seeded log-normal render times (median `median_ms`, log-space sigma `sigma`).
FrameTrace synthetic_trace(std::uint64_t seed, std::size_t frames, double median_ms = 8.0, double sigma = 0.5);

}  // namespace trainer::perf

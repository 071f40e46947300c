#include "trainer/perf/frame.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "trainer/error.hpp"
#include "trainer/perf/kernels.hpp"

namespace trainer::perf {

const char* to_string(VSync v) noexcept {
    switch (v) {
        case VSync::DontSync: return "dontsync";
        case VSync::EveryVBlank: return "every";
        case VSync::EverySecondVBlank: return "everysecond";
    }
    return "?";
}

VSync vsync_from_string(std::string_view text) {
    for (auto v : {VSync::DontSync, VSync::EveryVBlank, VSync::EverySecondVBlank}) {
        if (text == to_string(v)) return v;
    }
    throw DomainError("unknown vsync mode '" + std::string(text) + "' (dontsync|every|everysecond)");
}

FrameTrace::FrameTrace(std::vector<double> times_ms) : times_(std::move(times_ms)) {
    if (times_.empty()) throw DomainError("frame trace is empty");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(times_[i] > 0.0) || !std::isfinite(times_[i])) {
            throw DomainError("frame " + std::to_string(i) + " has non-positive time");
        }
    }
}

FrameTrace FrameTrace::parse(std::string_view text) {
    std::vector<double> times;
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            throw DomainError("trace line " + std::to_string(line_no) + ": not a number");
        }
        times.push_back(v);
    }
    return FrameTrace(std::move(times));
}

std::string FrameTrace::to_text() const {
    std::string out;
    char buf[32];
    for (double t : times_) {
        std::snprintf(buf, sizeof buf, "%.17g\n", t);
        out += buf;
    }
    return out;
}

FrameTrace pace(const FrameTrace& trace, VSyncMode vsync) {
    if (!(vsync.refresh_hz > 0.0)) throw DomainError("refresh rate must be > 0");
    if (vsync.mode == VSync::DontSync) return trace;
    const double period = vsync.mode == VSync::EveryVBlank ? vsync.period_ms() : 2.0 * vsync.period_ms();
    std::vector<double> out(trace.size());
    kernels::active().quantize(trace.times(), out, period);
    return FrameTrace(std::move(out));
}

MetricsSummary summarize(const FrameTrace& trace) {
    const auto m = kernels::active().moments(trace.times());
    const auto n = static_cast<double>(trace.size());
    MetricsSummary s;
    s.average_frame_time_ms = m.sum / n;
    s.maximum_frame_time_ms = m.max;
    s.average_frame_rate_fps = m.sum_reciprocal / n;
    s.reciprocal_mean_fps = 1000.0 / *s.average_frame_time_ms;
    return s;
}

Json MetricsSummary::to_json() const {
    Json j = Json::object();
    const auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("average_frame_time_ms", average_frame_time_ms);
    put("maximum_frame_time_ms", maximum_frame_time_ms);
    put("average_frame_rate_fps", average_frame_rate_fps);
    put("reciprocal_mean_fps", reciprocal_mean_fps);
    put("draw_call_peak", draw_call_peak);
    put("draw_call_average", draw_call_average);
    put("reserved_memory_peak_mb", reserved_memory_peak_mb);
    return j;
}

MetricsSummary MetricsSummary::from_json(const Json& j) {
    if (!j.is_object()) throw DomainError("metrics summary must be a JSON object");
    const auto get = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        if (!j.at(key).is_number()) throw DomainError(std::string("metric '") + key + "' must be a number");
        return j.at(key).get<double>();
    };
    MetricsSummary s;
    s.average_frame_time_ms = get("average_frame_time_ms");
    s.maximum_frame_time_ms = get("maximum_frame_time_ms");
    s.average_frame_rate_fps = get("average_frame_rate_fps");
    s.reciprocal_mean_fps = get("reciprocal_mean_fps");
    s.draw_call_peak = get("draw_call_peak");
    s.draw_call_average = get("draw_call_average");
    s.reserved_memory_peak_mb = get("reserved_memory_peak_mb");
    if (s.average_frame_time_ms && !(*s.average_frame_time_ms > 0.0)) {
        throw DomainError("average frame time must be > 0");
    }
    if (s.average_frame_time_ms && s.maximum_frame_time_ms && *s.maximum_frame_time_ms < *s.average_frame_time_ms) {
        throw DomainError("maximum frame time is below the average");
    }
    if (s.draw_call_average && s.draw_call_peak && *s.draw_call_peak < *s.draw_call_average) {
        throw DomainError("draw-call peak is below the average");
    }
    return s;
}

FrameTrace synthetic_trace(std::uint64_t seed, std::size_t frames, double median_ms, double sigma) {
    if (frames == 0) throw DomainError("synthetic trace needs at least one frame");
    if (!(median_ms > 0.0) || !(sigma >= 0.0)) throw DomainError("bad synthetic trace parameters");
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> dist(std::log(median_ms), sigma);
    std::vector<double> times(frames);
    for (auto& t : times) t = dist(rng);
    return FrameTrace(std::move(times));
}

}  // namespace trainer::perf

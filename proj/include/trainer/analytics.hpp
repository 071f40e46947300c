#pragma once

// Cohort analytics: score bands, band distributions, stage correctness rates, rubric aggregation.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trainer/session.hpp"

namespace trainer::analytics {

struct ScoreBand {
    int index;  // 0..4
    int lower;
    int upper;

    [[nodiscard]] std::string label() const;  // "0-20", "21-40", ...
    friend bool operator==(const ScoreBand&, const ScoreBand&) = default;
};

inline constexpr std::array<ScoreBand, 5> kBands = {
    ScoreBand{0, 0, 20}, ScoreBand{1, 21, 40}, ScoreBand{2, 41, 60}, ScoreBand{3, 61, 80}, ScoreBand{4, 81, 100}};

inline constexpr std::array<const char*, 7> kStageIds = {"S1", "S2", "S3", "S4", "S5", "S6", "S7"};

enum class RubricDimension { Q1, Q2, Q3 };
const char* to_string(RubricDimension d) noexcept;
const char* describe(RubricDimension d) noexcept;

/// Band holding round-half-up(score). Throws DomainError outside [0, 100].
ScoreBand band_of(double score);

/// Percentages per band, in band order, rounded to 2 decimals.
using BandDistribution = std::array<double, 5>;

/// 100 * correct / size rounded half-up to 2 decimals. Throws DomainError.
double correctness_rate(long long correct, long long size);

struct StudentResult {
    std::string student_id;
    std::optional<double> score;
    std::optional<std::array<double, 3>> rubric;               // Q1..Q3
    std::optional<std::array<bool, kStageIds.size()>> stages;  // S1..S7 correct

    friend bool operator==(const StudentResult&, const StudentResult&) = default;
};

struct CohortRecord {
    std::string group;
    std::vector<StudentResult> students;

    friend bool operator==(const CohortRecord&, const CohortRecord&) = default;
};

/// Lifts a session ScoreReport into a cohort row.
StudentResult student_from_report(std::string student_id, const ScoreReport& report);

/// Throws DomainError on an empty cohort or a student without a score.
BandDistribution band_distribution(const std::vector<double>& scores);
BandDistribution band_distribution(const CohortRecord& cohort);
/// Band distribution of one rubric dimension.
BandDistribution rubric_distribution(const CohortRecord& cohort, RubricDimension dimension);

using StageTable = std::array<std::pair<std::string, double>, kStageIds.size()>;

/// Per-stage correctness over the cohort, ordered S1..S7. Throws DomainError on a missing stage.
StageTable stage_correctness_table(const CohortRecord& cohort);
StageTable stage_correctness_table(const std::vector<ScoreReport>& reports);

/// Cohort CSV: student_id,group,score,q1,q2,q3,s1..s7 (header required, blank cells allowed).
std::vector<CohortRecord> read_cohort_csv(std::string_view text);
std::string write_cohort_csv(const std::vector<CohortRecord>& cohorts);

struct CohortReport {
    std::string group;
    std::size_t size = 0;
    std::optional<BandDistribution> scores;
    std::array<std::optional<BandDistribution>, 3> rubric;
    std::optional<StageTable> stages;
};

CohortReport build_report(const CohortRecord& cohort);
Json report_to_json(const std::vector<CohortReport>& reports);
/// Plain-text tables: band distribution per group, stage correctness per group.
std::string report_to_text(const std::vector<CohortReport>& reports);

}  // namespace trainer::analytics

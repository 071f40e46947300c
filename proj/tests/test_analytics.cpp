#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "trainer/analytics.hpp"
#include "trainer/error.hpp"

using namespace trainer;
using namespace trainer::analytics;

namespace {

// Exact rational oracle: hundredths of 100*k/n, rounded half up, computed in integers.
long long rate_hundredths(long long k, long long n) { return (20000 * k + n) / (2 * n); }

CohortRecord stage_cohort(const std::string& group, const std::array<int, 7>& correct, int size) {
    CohortRecord c;
    c.group = group;
    for (int i = 0; i < size; ++i) {
        StudentResult s;
        s.student_id = group + "-" + std::to_string(i);
        std::array<bool, 7> st{};
        for (std::size_t k = 0; k < 7; ++k) st[k] = i < correct[k];
        s.stages = st;
        c.students.push_back(s);
    }
    return c;
}

}  // namespace

TEST_CASE("band_of boundaries") {
    CHECK(band_of(0).index == 0);
    CHECK(band_of(20).index == 0);
    CHECK(band_of(20.4).index == 0);
    CHECK(band_of(20.5).index == 1);
    CHECK(band_of(20.6).index == 1);
    CHECK(band_of(21).index == 1);
    CHECK(band_of(80.49).index == 3);
    CHECK(band_of(100).index == 4);
    CHECK(band_of(100).label() == "81-100");
    CHECK_THROWS_AS(band_of(-0.1), DomainError);
    CHECK_THROWS_AS(band_of(100.01), DomainError);
    CHECK_THROWS_AS(band_of(std::nan("")), DomainError);
}

TEST_CASE("bands partition 0..100") {
    for (int s = 0; s <= 100; ++s) {
        int hits = 0;
        for (const auto& b : kBands) hits += (s >= b.lower && s <= b.upper);
        CHECK(hits == 1);
        CHECK(s >= band_of(s).lower);
        CHECK(s <= band_of(s).upper);
    }
}

TEST_CASE("band_distribution examples") {
    std::vector<double> t2 = {1, 5, 10, 12, 19, 20, 25, 33, 45, 58};
    CHECK(band_distribution(t2) == BandDistribution{60, 20, 20, 0, 0});
    CHECK(band_distribution(std::vector<double>(10, 15.0)) == BandDistribution{100, 0, 0, 0, 0});
    CHECK(band_distribution(std::vector<double>{50}) == BandDistribution{0, 0, 100, 0, 0});
    CHECK_THROWS_AS(band_distribution(std::vector<double>{}), DomainError);
}

TEST_CASE("band_distribution sums to 100 on random cohorts") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> score(0.0, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> scores(1 + rng() % 40);
        for (auto& s : scores) s = score(rng);
        auto d = band_distribution(scores);
        double sum = std::accumulate(d.begin(), d.end(), 0.0);
        // Each band is rounded on its own: at most 0.005 off per band.
        CHECK(std::abs(sum - 100.0) <= 0.025 + 1e-9);
        for (double p : d) CHECK(p >= 0.0);
    }
}

TEST_CASE("correctness_rate against the integer oracle") {
    CHECK(correctness_rate(8, 13) == 61.54);
    CHECK(correctness_rate(13, 13) == 100.0);
    CHECK(correctness_rate(2, 13) == 15.38);
    CHECK_THROWS_AS(correctness_rate(14, 13), DomainError);
    CHECK_THROWS_AS(correctness_rate(0, 0), DomainError);
    CHECK_THROWS_AS(correctness_rate(-1, 3), DomainError);
    for (long long n = 1; n <= 60; ++n) {
        for (long long k = 0; k <= n; ++k) {
            const double r = correctness_rate(k, n);
            CHECK(std::llround(r * 100.0) == rate_hundredths(k, n));
            CHECK((r == 100.0) == (k == n));
            CHECK((r == 0.0) == (k == 0));
        }
    }
}

TEST_CASE("stage correctness table") {
    auto c = stage_cohort("VR", {13, 11, 10, 13, 13, 12, 12}, 13);
    auto t = stage_correctness_table(c);
    CHECK(t[0] == std::pair<std::string, double>{"S1", 100.0});
    CHECK(t[1].second == 84.62);
    CHECK(t[2].second == 76.92);
    CHECK(t[6].first == "S7");

    auto one = stage_cohort("x", {1, 1, 0, 1, 1, 1, 1}, 1);
    auto t1 = stage_correctness_table(one);
    for (const auto& [id, rate] : t1) CHECK(rate == (id == "S3" ? 0.0 : 100.0));

    CohortRecord missing = c;
    missing.students[4].stages.reset();
    CHECK_THROWS_AS(stage_correctness_table(missing), DomainError);
}

TEST_CASE("stage correctness from session reports") {
    auto s = testsupport::fixture();
    std::vector<ScoreReport> reports;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        reports.push_back(testsupport::run_script(s, testsupport::random_script(*s, seed), Mode::Examination).report);
    }
    auto table = stage_correctness_table(reports);
    for (std::size_t k = 0; k < 7; ++k) {
        long long ok = 0;
        for (const auto& r : reports) ok += r.stage_correctness()[k].second;
        CHECK(table[k].second == correctness_rate(ok, 12));
    }
}

TEST_CASE("cohort csv round trip and validation") {
    const std::string csv =
        "student_id,group,score,q1,q2,q3,s1,s2,s3,s4,s5,s6,s7\n"
        "a,VR,95,90,80,85,1,1,0,1,1,1,1\n"
        "b,VR,88.5,,,,1,1,1,1,1,1,1\n"
        "c,TR,40,,,,,,,,,,\n";
    auto cohorts = read_cohort_csv(csv);
    REQUIRE(cohorts.size() == 2);
    CHECK(cohorts[0].group == "VR");
    CHECK(cohorts[0].students.size() == 2);
    CHECK(cohorts[0].students[0].rubric == std::array<double, 3>{90, 80, 85});
    CHECK_FALSE(cohorts[0].students[1].rubric);
    CHECK_FALSE(cohorts[1].students[0].stages);
    CHECK(read_cohort_csv(write_cohort_csv(cohorts)) == cohorts);

    CHECK_THROWS_AS(read_cohort_csv("student_id,group\n"), Error);
    CHECK_THROWS_AS(read_cohort_csv(std::string(csv) + "a,VR,1,,,,,,,,,,\n"), Error);
    CHECK_THROWS_AS(read_cohort_csv(std::string(csv) + "d,VR,1,,,,2,1,1,1,1,1,1\n"), Error);
}

TEST_CASE("shipped cohort csv reproduces the band and stage figures") {
    auto cohorts = read_cohort_csv(testsupport::read_text(testsupport::source_path("fixtures/cohorts/study.csv")));
    std::map<std::string, CohortReport> by_group;
    for (const auto& c : cohorts) by_group[c.group] = build_report(c);
    CHECK(*by_group.at("T1").scores == BandDistribution{100, 0, 0, 0, 0});
    CHECK(*by_group.at("T2").scores == BandDistribution{60, 20, 20, 0, 0});
    CHECK(*by_group.at("T3").scores == BandDistribution{0, 0, 20, 40, 40});
    CHECK(by_group.at("traditional").size == 13);
    const std::array<double, 7> vr = {100.0, 84.62, 76.92, 100.0, 100.0, 92.31, 92.31};
    for (std::size_t k = 0; k < 7; ++k) CHECK((*by_group.at("VR").stages)[k].second == vr[k]);

    std::vector<CohortReport> all;
    for (const auto& c : cohorts) all.push_back(build_report(c));
    auto text = report_to_text(all);
    CHECK(text.find("61.54") != std::string::npos);
    CHECK(report_to_json(all)["groups"].size() == cohorts.size());
}

TEST_CASE("rubric distribution") {
    CohortRecord c;
    c.group = "g";
    for (int i = 0; i < 4; ++i) {
        StudentResult s;
        s.student_id = std::to_string(i);
        s.rubric = std::array<double, 3>{10.0 + 30 * i, 50, 95};
        c.students.push_back(s);
    }
    CHECK(rubric_distribution(c, RubricDimension::Q1) == BandDistribution{25, 25, 0, 25, 25});
    CHECK(rubric_distribution(c, RubricDimension::Q3) == BandDistribution{0, 0, 0, 0, 100});
    CHECK(std::string(describe(RubricDimension::Q2)).find("motivation") != std::string::npos);
}

#include "trainer/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "trainer/error.hpp"

namespace trainer::analytics {

std::string ScoreBand::label() const { return std::to_string(lower) + "-" + std::to_string(upper); }

const char* to_string(RubricDimension d) noexcept {
    switch (d) {
        case RubricDimension::Q1: return "Q1";
        case RubricDimension::Q2: return "Q2";
        case RubricDimension::Q3: return "Q3";
    }
    return "?";
}

const char* describe(RubricDimension d) noexcept {
    switch (d) {
        case RubricDimension::Q1: return "proficiency in disassembling and assembling the engine";
        case RubricDimension::Q2: return "motivation to learn disassembly and assembly";
        case RubricDimension::Q3: return "proficiency in using tools";
    }
    return "";
}

ScoreBand band_of(double score) {
    if (!(score >= 0.0 && score <= 100.0)) {
        throw DomainError("score " + std::to_string(score) + " is outside [0, 100]");
    }
    const auto rounded = static_cast<int>(std::floor(score + 0.5));
    if (rounded <= 20) return kBands[0];
    return kBands[static_cast<std::size_t>((rounded - 1) / 20)];
}

double correctness_rate(long long correct, long long size) {
    if (size <= 0) throw DomainError("cohort size must be > 0");
    if (correct < 0 || correct > size) {
        throw DomainError("correct count " + std::to_string(correct) + " outside [0, " + std::to_string(size) + "]");
    }
    // Integer round-half-up of 10000 * correct / size, i.e. hundredths of a percent.
    const long long hundredths = (20000LL * correct + size) / (2LL * size);
    return static_cast<double>(hundredths) / 100.0;
}

BandDistribution band_distribution(const std::vector<double>& scores) {
    if (scores.empty()) throw DomainError("empty cohort");
    std::array<long long, 5> counts{};
    for (double s : scores) ++counts[static_cast<std::size_t>(band_of(s).index)];
    BandDistribution out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = correctness_rate(counts[i], static_cast<long long>(scores.size()));
    }
    return out;
}

BandDistribution band_distribution(const CohortRecord& cohort) {
    std::vector<double> scores;
    for (const auto& s : cohort.students) {
        if (!s.score) throw DomainError("student '" + s.student_id + "' has no score");
        scores.push_back(*s.score);
    }
    return band_distribution(scores);
}

BandDistribution rubric_distribution(const CohortRecord& cohort, RubricDimension dimension) {
    std::vector<double> scores;
    for (const auto& s : cohort.students) {
        if (!s.rubric) throw DomainError("student '" + s.student_id + "' has no rubric scores");
        scores.push_back((*s.rubric)[static_cast<std::size_t>(dimension)]);
    }
    return band_distribution(scores);
}

StudentResult student_from_report(std::string student_id, const ScoreReport& report) {
    StudentResult s;
    s.student_id = std::move(student_id);
    s.score = report.score;
    std::array<bool, kStageIds.size()> stages{};
    std::array<bool, kStageIds.size()> seen{};
    for (const auto& st : report.stages) {
        for (std::size_t i = 0; i < kStageIds.size(); ++i) {
            if (st.id == kStageIds[i]) {
                stages[i] = st.correct;
                seen[i] = true;
            }
        }
    }
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) s.stages = stages;
    return s;
}

StageTable stage_correctness_table(const CohortRecord& cohort) {
    if (cohort.students.empty()) throw DomainError("empty cohort");
    std::array<long long, kStageIds.size()> correct{};
    for (const auto& s : cohort.students) {
        if (!s.stages) throw DomainError("student '" + s.student_id + "' is missing the S1..S7 stage map");
        for (std::size_t i = 0; i < kStageIds.size(); ++i) correct[i] += (*s.stages)[i];
    }
    StageTable table;
    for (std::size_t i = 0; i < kStageIds.size(); ++i) {
        table[i] = {kStageIds[i], correctness_rate(correct[i], static_cast<long long>(cohort.students.size()))};
    }
    return table;
}

StageTable stage_correctness_table(const std::vector<ScoreReport>& reports) {
    CohortRecord cohort;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        auto s = student_from_report(reports[i].session_id.empty() ? std::to_string(i) : reports[i].session_id,
                                     reports[i]);
        if (!s.stages) throw DomainError("report '" + reports[i].session_id + "' is missing the S1..S7 stage map");
        cohort.students.push_back(std::move(s));
    }
    return stage_correctness_table(cohort);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    out.push_back(std::move(cell));
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no, const char* column) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw Error("cohort csv line " + std::to_string(line_no) + ": bad " + column + " '" + cell + "'");
    }
}

constexpr const char* kHeader[] = {"student_id", "group", "score", "q1", "q2", "q3",
                                   "s1", "s2", "s3", "s4", "s5", "s6", "s7"};

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::vector<CohortRecord> read_cohort_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<CohortRecord> cohorts;
    bool header_seen = false;
    std::map<std::string, std::set<std::string>> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (!header_seen) {
            if (cells.size() != std::size(kHeader)) throw Error("cohort csv: header must have 13 columns");
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] != kHeader[i]) throw Error("cohort csv: unexpected header column '" + cells[i] + "'");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != std::size(kHeader)) {
            throw Error("cohort csv line " + std::to_string(line_no) + ": expected 13 columns");
        }
        StudentResult s;
        s.student_id = cells[0];
        if (s.student_id.empty()) throw Error("cohort csv line " + std::to_string(line_no) + ": empty student_id");
        const auto& group = cells[1];
        if (!ids[group].insert(s.student_id).second) {
            throw Error("cohort csv line " + std::to_string(line_no) + ": duplicate student '" + s.student_id +
                        "' in group '" + group + "'");
        }
        if (!cells[2].empty()) s.score = parse_number(cells[2], line_no, "score");
        if (!cells[3].empty() || !cells[4].empty() || !cells[5].empty()) {
            s.rubric = std::array<double, 3>{parse_number(cells[3], line_no, "q1"),
                                             parse_number(cells[4], line_no, "q2"),
                                             parse_number(cells[5], line_no, "q3")};
        }
        bool any_stage = false;
        for (std::size_t i = 6; i < 13; ++i) any_stage |= !cells[i].empty();
        if (any_stage) {
            std::array<bool, kStageIds.size()> st{};
            for (std::size_t i = 0; i < kStageIds.size(); ++i) {
                const auto& c = cells[6 + i];
                if (c != "0" && c != "1") {
                    throw Error("cohort csv line " + std::to_string(line_no) + ": stage cells must be 0 or 1");
                }
                st[i] = c == "1";
            }
            s.stages = st;
        }
        auto it = std::find_if(cohorts.begin(), cohorts.end(), [&](const CohortRecord& c) { return c.group == group; });
        if (it == cohorts.end()) {
            cohorts.push_back({group, {}});
            it = cohorts.end() - 1;
        }
        it->students.push_back(std::move(s));
    }
    if (!header_seen) throw Error("cohort csv: missing header");
    return cohorts;
}

std::string write_cohort_csv(const std::vector<CohortRecord>& cohorts) {
    std::string out;
    for (std::size_t i = 0; i < std::size(kHeader); ++i) {
        if (i) out += ',';
        out += kHeader[i];
    }
    out += '\n';
    for (const auto& c : cohorts) {
        for (const auto& s : c.students) {
            out += s.student_id + "," + c.group + ",";
            out += s.score ? trim_number(*s.score) : "";
            for (std::size_t q = 0; q < 3; ++q) {
                out += ',';
                if (s.rubric) out += trim_number((*s.rubric)[q]);
            }
            for (std::size_t k = 0; k < kStageIds.size(); ++k) {
                out += ',';
                if (s.stages) out += (*s.stages)[k] ? "1" : "0";
            }
            out += '\n';
        }
    }
    return out;
}

CohortReport build_report(const CohortRecord& cohort) {
    if (cohort.students.empty()) throw DomainError("empty cohort");
    CohortReport r;
    r.group = cohort.group;
    r.size = cohort.students.size();
    const auto all = [&](auto pred) { return std::all_of(cohort.students.begin(), cohort.students.end(), pred); };
    if (all([](const StudentResult& s) { return s.score.has_value(); })) r.scores = band_distribution(cohort);
    if (all([](const StudentResult& s) { return s.rubric.has_value(); })) {
        for (auto d : {RubricDimension::Q1, RubricDimension::Q2, RubricDimension::Q3}) {
            r.rubric[static_cast<std::size_t>(d)] = rubric_distribution(cohort, d);
        }
    }
    if (all([](const StudentResult& s) { return s.stages.has_value(); })) r.stages = stage_correctness_table(cohort);
    return r;
}

Json report_to_json(const std::vector<CohortReport>& reports) {
    const auto bands_json = [](const BandDistribution& d) {
        Json j = Json::object();
        for (std::size_t i = 0; i < d.size(); ++i) j[kBands[i].label()] = d[i];
        return j;
    };
    Json groups = Json::array();
    for (const auto& r : reports) {
        Json g{{"group", r.group}, {"size", r.size}};
        g["score_bands"] = r.scores ? bands_json(*r.scores) : Json(nullptr);
        Json rubric = Json::object();
        for (auto d : {RubricDimension::Q1, RubricDimension::Q2, RubricDimension::Q3}) {
            const auto& dist = r.rubric[static_cast<std::size_t>(d)];
            rubric[to_string(d)] = dist ? bands_json(*dist) : Json(nullptr);
        }
        g["rubric_bands"] = std::move(rubric);
        if (r.stages) {
            Json st = Json::object();
            for (const auto& [id, rate] : *r.stages) st[id] = rate;
            g["stage_correctness"] = std::move(st);
        } else {
            g["stage_correctness"] = nullptr;
        }
        groups.push_back(std::move(g));
    }
    return Json{{"groups", std::move(groups)}};
}

std::string report_to_text(const std::vector<CohortReport>& reports) {
    std::ostringstream out;
    char line[256];

    out << "Score bands (% of students)\n";
    std::snprintf(line, sizeof line, "%-14s %8s %8s %8s %8s %8s\n", "group", "0-20", "21-40", "41-60", "61-80",
                  "81-100");
    out << line;
    const auto band_row = [&](const std::string& label, const BandDistribution& d) {
        std::snprintf(line, sizeof line, "%-14s %8s %8s %8s %8s %8s\n", label.c_str(), fmt2(d[0]).c_str(),
                      fmt2(d[1]).c_str(), fmt2(d[2]).c_str(), fmt2(d[3]).c_str(), fmt2(d[4]).c_str());
        out << line;
    };
    for (const auto& r : reports) {
        if (r.scores) band_row(r.group, *r.scores);
        for (auto d : {RubricDimension::Q1, RubricDimension::Q2, RubricDimension::Q3}) {
            const auto& dist = r.rubric[static_cast<std::size_t>(d)];
            if (dist) band_row(r.group + "/" + to_string(d), *dist);
        }
    }

    out << "\nStage correctness (% of students)\n";
    std::snprintf(line, sizeof line, "%-14s", "group");
    out << line;
    for (const auto* id : kStageIds) {
        std::snprintf(line, sizeof line, " %7s", id);
        out << line;
    }
    out << '\n';
    for (const auto& r : reports) {
        if (!r.stages) continue;
        std::snprintf(line, sizeof line, "%-14s", r.group.c_str());
        out << line;
        for (const auto& [id, rate] : *r.stages) {
            std::snprintf(line, sizeof line, " %7s", fmt2(rate).c_str());
            out << line;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace trainer::analytics

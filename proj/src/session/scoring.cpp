#include <algorithm>

#include "trainer/analytics.hpp"
#include "trainer/error.hpp"
#include "trainer/session.hpp"

namespace trainer {

ScoringRules ScoringRules::defaults(const Scenario& scenario) {
    ScoringRules rules;
    if (!scenario.steps.empty()) {
        const double each = 100.0 / static_cast<double>(scenario.steps.size());
        for (const auto& step : scenario.steps) rules.points_per_step[step.id] = each;
    }
    rules.deduction_per_error = {{ErrorKind::WrongOrder, 5.0},
                                 {ErrorKind::WrongTool, 5.0},
                                 {ErrorKind::WrongTorque, 5.0},
                                 {ErrorKind::WrongAction, 3.0},
                                 {ErrorKind::UnknownTarget, 2.0}};
    rules.floor_at_zero = true;
    return rules;
}

double ScoringRules::total_points() const {
    double total = 0.0;
    for (const auto& [id, pts] : points_per_step) total += pts;
    return total;
}

double ScoringRules::deduction(ErrorKind kind) const {
    auto it = deduction_per_error.find(kind);
    return it == deduction_per_error.end() ? 0.0 : it->second;
}

Json ScoringRules::to_json() const {
    Json points = Json::object();
    for (const auto& [id, pts] : points_per_step) points[id] = pts;
    Json deductions = Json::object();
    for (const auto& [kind, d] : deduction_per_error) deductions[to_string(kind)] = d;
    return Json{{"points", std::move(points)}, {"deductions", std::move(deductions)}, {"floor_at_zero", floor_at_zero}};
}

ScoringRules ScoringRules::from_json(const Json& j) {
    ScoringRules r;
    for (const auto& item : j.at("points").items()) {
        double v = item.value().get<double>();
        if (v < 0.0) throw Error("points for '" + item.key() + "' must be >= 0");
        r.points_per_step[item.key()] = v;
    }
    for (const auto& item : j.at("deductions").items()) {
        auto kind = error_kind_from_string(item.key());
        if (!kind) throw Error("unknown error kind '" + item.key() + "'");
        double v = item.value().get<double>();
        if (v < 0.0) throw Error("deduction for '" + item.key() + "' must be >= 0");
        r.deduction_per_error[*kind] = v;
    }
    r.floor_at_zero = j.at("floor_at_zero").get<bool>();
    return r;
}

std::string ScoringRules::digest() const { return fnv1a_hex(to_canonical(to_json())); }

ScoreReport Session::finish_and_score() const { return finish_and_score(rules_); }

ScoreReport Session::finish_and_score(const ScoringRules& rules) const {
    if (!state_.finished) {
        throw SessionError(SessionError::Kind::SessionNotFinished,
                           "session '" + state_.session_id + "' has not finished");
    }
    const Scenario& sc = *scenario_;
    ScoreReport r;
    r.session_id = state_.session_id;
    r.scenario_id = sc.id;
    r.mode = state_.mode;
    r.abandoned = state_.abandoned;
    r.total_steps = sc.steps.size();
    r.completed_steps = state_.completed.size();

    std::map<std::string, std::size_t> errors_by_step;
    for (const auto& e : state_.error_log) {
        ++errors_by_step[e.step_id];
        ++r.error_counts[e.kind];
        r.deductions += rules.deduction(e.kind);
    }

    // Sum in authored order on both sides so a perfect run yields exactly 100.
    for (const auto& step : sc.steps) {
        auto it = rules.points_per_step.find(step.id);
        const double pts = it == rules.points_per_step.end() ? 0.0 : it->second;
        r.total_points += pts;
        const bool done = state_.completed.count(step.id) > 0;
        if (done) r.earned_points += pts;
        r.steps.push_back({step.id, step.stage, done, errors_by_step[step.id]});
    }

    double score = r.total_points > 0.0 ? 100.0 * r.earned_points / r.total_points : 0.0;
    score -= r.deductions;
    score = std::min(score, 100.0);
    if (rules.floor_at_zero) score = std::max(score, 0.0);
    r.score = score;
    r.band = score >= 0.0 ? analytics::band_of(score).label() : "below-0";

    const auto progress_stages = progress().per_stage;
    for (const auto& [stage_id, fraction] : progress_stages) {
        StageResult st;
        st.id = stage_id;
        for (const auto& s : sc.stages) {
            if (s.id == stage_id) st.title = s.title;
        }
        for (const auto& sr : r.steps) {
            if (sr.stage != stage_id) continue;
            ++st.steps;
            st.completed += sr.completed;
            st.errors += sr.errors;
        }
        st.correct = st.steps > 0 && st.completed == st.steps && st.errors == 0;
        r.stages.push_back(std::move(st));
    }
    return r;
}

Json ScoreReport::to_json() const {
    Json errors = Json::object();
    for (auto k : kAllErrorKinds) {
        auto it = error_counts.find(k);
        errors[to_string(k)] = it == error_counts.end() ? 0 : it->second;
    }
    Json stage_list = Json::array();
    for (const auto& s : stages) {
        stage_list.push_back({{"id", s.id}, {"title", s.title}, {"steps", s.steps}, {"completed", s.completed},
                              {"errors", s.errors}, {"correct", s.correct}});
    }
    Json step_list = Json::array();
    for (const auto& s : steps) {
        step_list.push_back({{"id", s.id}, {"stage", s.stage}, {"completed", s.completed}, {"errors", s.errors}});
    }
    return Json{{"session_id", session_id},
                {"scenario_id", scenario_id},
                {"mode", to_string(mode)},
                {"abandoned", abandoned},
                {"completed_steps", completed_steps},
                {"total_steps", total_steps},
                {"earned_points", earned_points},
                {"total_points", total_points},
                {"deductions", deductions},
                {"score", score},
                {"band", band},
                {"errors", std::move(errors)},
                {"stages", std::move(stage_list)},
                {"steps", std::move(step_list)}};
}

ScoreReport ScoreReport::from_json(const Json& j) {
    ScoreReport r;
    r.session_id = j.at("session_id").get<std::string>();
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.abandoned = j.at("abandoned").get<bool>();
    r.completed_steps = j.at("completed_steps").get<std::size_t>();
    r.total_steps = j.at("total_steps").get<std::size_t>();
    r.earned_points = j.at("earned_points").get<double>();
    r.total_points = j.at("total_points").get<double>();
    r.deductions = j.at("deductions").get<double>();
    r.score = j.at("score").get<double>();
    r.band = j.at("band").get<std::string>();
    for (const auto& item : j.at("errors").items()) {
        auto kind = error_kind_from_string(item.key());
        if (!kind) throw Error("unknown error kind '" + item.key() + "'");
        auto n = item.value().get<std::size_t>();
        if (n) r.error_counts[*kind] = n;
    }
    for (const auto& s : j.at("stages")) {
        r.stages.push_back({s.at("id").get<std::string>(), s.at("title").get<std::string>(),
                            s.at("steps").get<std::size_t>(), s.at("completed").get<std::size_t>(),
                            s.at("errors").get<std::size_t>(), s.at("correct").get<bool>()});
    }
    for (const auto& s : j.at("steps")) {
        r.steps.push_back({s.at("id").get<std::string>(), s.at("stage").get<std::string>(),
                           s.at("completed").get<bool>(), s.at("errors").get<std::size_t>()});
    }
    return r;
}

std::vector<std::pair<std::string, bool>> ScoreReport::stage_correctness() const {
    std::vector<std::pair<std::string, bool>> out;
    for (const auto& s : stages) out.emplace_back(s.id, s.correct);
    return out;
}

}  // namespace trainer

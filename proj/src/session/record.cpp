#include "trainer/error.hpp"
#include "trainer/session.hpp"

namespace trainer {

namespace {

[[noreturn]] void corrupt(const std::string& message) {
    throw SessionError(SessionError::Kind::LogCorruption, "log corruption: " + message);
}

std::optional<std::string> payload_string(const Payload& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end()) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    corrupt(std::string("payload field '") + key + "' is not a string");
}

std::optional<double> payload_number(const Payload& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end()) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    corrupt(std::string("payload field '") + key + "' is not a number");
}

}  // namespace

ScoreReport replay(std::shared_ptr<const Scenario> scenario, Mode mode, const ScoringRules& rules,
                   const std::vector<EventMessage>& log, std::string session_id) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].sequence != i + 1) {
            corrupt("sequence gap: expected " + std::to_string(i + 1) + ", found " + std::to_string(log[i].sequence));
        }
    }

    Session session = start_session(std::move(scenario), mode, HintConfig::none(), rules, std::move(session_id));
    for (const auto& m : log) {
        if (m.type == EventType::ActionPerformed) {
            if (!session.scenario().find_step(m.target)) corrupt("unknown step id '" + m.target + "'");
            if (session.state().finished) corrupt("attempt recorded after the session finished");
            AttemptInput input;
            input.step_id = m.target;
            auto action = payload_string(m.payload, "action");
            if (!action) corrupt("attempt without an action");
            try {
                input.action = action_from_string(*action);
            } catch (const ScenarioError& e) {
                corrupt(e.what());
            }
            input.part = payload_string(m.payload, "part");
            input.tool = payload_string(m.payload, "tool");
            input.torque_nm = payload_number(m.payload, "torque_nm");
            input.t_ms = m.timestamp_ms;
            session.attempt(input);
        } else if (m.type == EventType::SessionFinished) {
            if (payload_string(m.payload, "reason") == "abandoned") {
                if (session.state().finished) corrupt("abandonment recorded after the session finished");
                session.abandon(m.timestamp_ms);
            }
        }
    }
    if (!session.state().finished) corrupt("log ends before the session finished");
    return session.finish_and_score();
}

Json SessionRecord::to_json() const {
    Json events_json = Json::array();
    for (const auto& e : events) events_json.push_back(Json::parse(event_to_json_line(e)));
    Json header{{"session_id", session_id},
                {"scenario_id", scenario_id},
                {"student_id", student_id},
                {"group", group},
                {"mode", trainer::to_string(mode)},
                {"hints", hints_to_json(hints)},
                {"rules", rules.to_json()},
                {"rules_digest", rules.digest()}};
    return Json{{"format", 1}, {"header", std::move(header)}, {"events", std::move(events_json)},
                {"report", report.to_json()}};
}

SessionRecord SessionRecord::from_json(const Json& j) {
    if (!j.is_object() || j.value("format", 0) != 1) throw Error("session record: unsupported format");
    const auto& h = j.at("header");
    SessionRecord r;
    r.session_id = h.at("session_id").get<std::string>();
    r.scenario_id = h.at("scenario_id").get<std::string>();
    r.student_id = h.at("student_id").get<std::string>();
    r.group = h.at("group").get<std::string>();
    r.mode = mode_from_string(h.at("mode").get<std::string>());
    r.hints = hints_from_json(h.at("hints"));
    r.rules = ScoringRules::from_json(h.at("rules"));
    if (h.at("rules_digest").get<std::string>() != r.rules.digest()) {
        throw Error("session record: rules digest does not match the embedded rules");
    }
    for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
    r.report = ScoreReport::from_json(j.at("report"));
    if (r.session_id.empty()) throw Error("session record: empty session id");
    return r;
}

SessionRecord SessionRecord::parse(std::string_view document) {
    try {
        return from_json(Json::parse(document.begin(), document.end()));
    } catch (const Json::exception& e) {
        throw Error(std::string("session record: ") + e.what());
    }
}

SessionRecord make_record(const Session& session, std::string student_id, std::string group) {
    SessionRecord r;
    const auto& st = session.state();
    r.session_id = st.session_id;
    r.scenario_id = st.scenario_id;
    r.student_id = std::move(student_id);
    r.group = std::move(group);
    r.mode = st.mode;
    r.hints = st.hints;
    r.rules = session.rules();
    r.events = session.event_log();
    r.report = session.finish_and_score();
    return r;
}

ScoreReport replay_record(std::shared_ptr<const Scenario> scenario, const SessionRecord& record) {
    if (!scenario || scenario->id != record.scenario_id) {
        throw SessionError(SessionError::Kind::InvalidScenario,
                           "record targets scenario '" + record.scenario_id + "'");
    }
    return replay(std::move(scenario), record.mode, record.rules, record.events, record.session_id);
}

}  // namespace trainer

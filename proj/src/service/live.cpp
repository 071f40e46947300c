#include "trainer/service/live.hpp"

#include "trainer/error.hpp"

namespace trainer::service {

namespace {

Json events_json(const std::vector<EventMessage>& events) {
    Json out = Json::array();
    for (const auto& e : events) out.push_back(Json::parse(event_to_json_line(e)));
    return out;
}

template <typename T>
std::optional<T> optional_field(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

}  // namespace

LiveSessions::LiveSessions(SessionStore& store) : store_(store) {}

std::string LiveSessions::create(const std::string& scenario_id, Mode mode, HintConfig hints, std::string student_id,
                                 std::string group, std::optional<std::string> session_id) {
    auto scenario = store_.catalog().find(scenario_id);
    if (!scenario) throw Error("unknown scenario '" + scenario_id + "'");

    std::unique_lock lock(mutex_);
    std::string id;
    if (session_id) {
        if (!valid_session_id(*session_id)) throw Error("invalid session id '" + *session_id + "'");
        if (sessions_.count(*session_id) || store_.get(*session_id)) {
            throw StoreError(StoreError::Kind::DuplicateId, "session '" + *session_id + "' already exists");
        }
        id = *session_id;
    } else {
        do {
            id = "live-" + std::to_string(++counter_);
        } while (sessions_.count(id) || store_.get(id));
    }

    auto rules = ScoringRules::defaults(*scenario);
    auto session = start_session(std::move(scenario), mode, hints, std::move(rules), id);
    sessions_.emplace(id, std::make_shared<Entry>(std::move(session),
                                                  LiveSessionInfo{std::move(student_id), std::move(group), {}}));
    return id;
}

std::shared_ptr<LiveSessions::Entry> LiveSessions::find(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw LiveSessionNotFound("no live session '" + session_id + "'");
    return it->second;
}

Json LiveSessions::state_locked(const Entry& entry) const {
    const auto& st = entry.session.state();
    auto progress = entry.session.progress();
    Json per_stage = Json::object();
    for (const auto& [stage, fraction] : progress.per_stage) per_stage[stage] = fraction;
    Json errors = Json::array();
    for (const auto& e : st.error_log) {
        errors.push_back({{"step", e.step_id}, {"kind", to_string(e.kind)}, {"t_ms", e.t_ms}});
    }
    Json parts = Json::object();
    for (const auto& [part, ps] : st.part_states) parts[part] = to_string(ps);
    Json out{{"session_id", st.session_id},
             {"scenario_id", st.scenario_id},
             {"mode", to_string(st.mode)},
             {"hints", hints_to_json(st.hints)},
             {"completed", st.completed},
             {"candidates", st.candidates},
             {"focus_step", st.focus_step ? Json(*st.focus_step) : Json(nullptr)},
             {"errors", std::move(errors)},
             {"part_states", std::move(parts)},
             {"held_tool", st.held_tool ? Json{{"tool", st.held_tool->tool_id}} : Json(nullptr)},
             {"progress", {{"completed", progress.completed}, {"total", progress.total},
                           {"fraction", progress.fraction}, {"per_stage", std::move(per_stage)}}},
             {"finished", st.finished},
             {"abandoned", st.abandoned},
             {"student_id", entry.info.student_id},
             {"group", entry.info.group},
             {"stored_id", entry.info.stored_id ? Json(*entry.info.stored_id) : Json(nullptr)}};
    if (st.finished) out["report"] = entry.session.finish_and_score().to_json();
    return out;
}

void LiveSessions::store_if_finished(Entry& entry) {
    if (!entry.session.state().finished || entry.info.stored_id) return;
    auto record = make_record(entry.session, entry.info.student_id, entry.info.group);
    store_.ingest(record);
    entry.info.stored_id = record.session_id;
}

Json LiveSessions::attempt(const std::string& session_id, const Json& body) {
    auto entry = find(session_id);
    AttemptInput input;
    try {
        input.step_id = body.at("step").get<std::string>();
        input.action = action_from_string(body.at("action").get<std::string>());
        input.part = optional_field<std::string>(body, "part");
        input.tool = optional_field<std::string>(body, "tool");
        input.torque_nm = optional_field<double>(body, "torque_nm");
        input.t_ms = optional_field<std::int64_t>(body, "t_ms").value_or(0);
    } catch (const Json::exception& e) {
        throw Error(std::string("attempt body: ") + e.what());
    }

    std::lock_guard lock(entry->mutex);
    // Recorded timestamps must not run backwards.
    input.t_ms = std::max(input.t_ms, entry->session.state().clock_ms);
    auto outcome = entry->session.attempt(input);
    store_if_finished(*entry);
    return Json{{"accepted", outcome.accepted},
                {"error", outcome.error ? Json(to_string(*outcome.error)) : Json(nullptr)},
                {"events", events_json(outcome.events)},
                {"state", state_locked(*entry)}};
}

Json LiveSessions::abandon(const std::string& session_id, std::int64_t t_ms) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    if (entry->session.state().finished) {
        throw SessionError(SessionError::Kind::SessionFinished, "session '" + session_id + "' already finished");
    }
    entry->session.abandon(std::max(t_ms, entry->session.state().clock_ms));
    store_if_finished(*entry);
    return state_locked(*entry);
}

Json LiveSessions::state(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return state_locked(*entry);
}

std::string LiveSessions::event_log(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return write_event_log(entry->session.event_log());
}

bool LiveSessions::contains(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    return sessions_.count(session_id) > 0;
}

}  // namespace trainer::service

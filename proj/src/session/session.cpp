#include "trainer/session.hpp"

#include <algorithm>
#include <cmath>

#include "trainer/error.hpp"

namespace trainer {

namespace {

constexpr double kTorqueTolerance = 1e-9;

bool torque_matches(double supplied, double required) {
    return std::fabs(supplied - required) <= kTorqueTolerance * std::max(1.0, std::fabs(required));
}

}  // namespace

const char* to_string(Mode mode) noexcept { return mode == Mode::Training ? "training" : "examination"; }

Mode mode_from_string(std::string_view text) {
    if (text == "training") return Mode::Training;
    if (text == "examination" || text == "exam") return Mode::Examination;
    throw Error("unknown mode '" + std::string(text) + "'");
}

HintConfig HintConfig::preset(std::string_view name) {
    if (name == "T1" || name == "t1") return t1();
    if (name == "T2" || name == "t2") return t2();
    if (name == "T3" || name == "t3") return t3();
    if (name == "none") return none();
    throw Error("unknown hint preset '" + std::string(name) + "'");
}

Json hints_to_json(const HintConfig& h) {
    return Json{{"voice", h.voice}, {"text", h.text}, {"tablet_display", h.tablet_display},
                {"screen_display", h.screen_display}};
}

HintConfig hints_from_json(const Json& j) {
    return HintConfig{j.at("voice").get<bool>(), j.at("text").get<bool>(), j.at("tablet_display").get<bool>(),
                      j.at("screen_display").get<bool>()};
}

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::WrongOrder: return "wrong-order";
        case ErrorKind::WrongTool: return "wrong-tool";
        case ErrorKind::WrongTorque: return "wrong-torque";
        case ErrorKind::WrongAction: return "wrong-action";
        case ErrorKind::UnknownTarget: return "unknown-target";
    }
    return "?";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view text) noexcept {
    for (auto k : kAllErrorKinds) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

Session::Session(std::shared_ptr<const Scenario> scenario, Mode mode, HintConfig hints, ScoringRules rules,
                 std::string session_id)
    : scenario_(std::move(scenario)), rules_(std::move(rules)), bus_(std::make_unique<EventBus>()) {
    if (!scenario_) throw SessionError(SessionError::Kind::InvalidScenario, "no scenario");
    const auto diagnostics = validate_scenario(*scenario_);
    if (!diagnostics.empty()) {
        throw SessionError(SessionError::Kind::InvalidScenario,
                           "scenario '" + scenario_->id + "' is invalid: " + diagnostics.front().message);
    }
    if (session_id.empty()) throw Error("session id must be non-empty");

    const auto order = topological_order(*scenario_);
    for (std::size_t i = 0; i < order.size(); ++i) topo_rank_[order[i]] = i;

    state_.session_id = std::move(session_id);
    state_.scenario_id = scenario_->id;
    state_.mode = mode;
    state_.hints = mode == Mode::Examination ? HintConfig::none() : hints;
    for (const auto& p : scenario_->parts) state_.part_states[p.id] = p.initial_state;
    recompute_candidates();
}

void Session::begin() {
    if (scenario_->steps.empty()) {
        state_.finished = true;
        publish(EventType::SessionFinished, state_.session_id, {{"reason", std::string("completed")}}, nullptr);
        return;
    }
    focus_and_hint(nullptr);
}

void Session::recompute_candidates() {
    state_.candidates.clear();
    for (const auto& step : scenario_->steps) {
        if (state_.completed.count(step.id)) continue;
        const bool ready = std::all_of(step.prerequisites.begin(), step.prerequisites.end(),
                                       [&](const std::string& p) { return state_.completed.count(p) > 0; });
        if (ready) state_.candidates.insert(step.id);
    }
}

void Session::publish(EventType type, std::string target, Payload payload, std::vector<EventMessage>* sink) {
    EventMessage m{type, std::move(target), std::move(payload), 0, state_.clock_ms};
    bus_->publish(std::move(m));
    if (sink) sink->push_back(bus_->log().back());
}

void Session::focus_and_hint(std::vector<EventMessage>* sink) {
    // Focus on the candidate that comes first in topological order.
    std::optional<std::string> next;
    std::size_t best = static_cast<std::size_t>(-1);
    for (const auto& id : state_.candidates) {
        auto rank = topo_rank_.at(id);
        if (rank < best) {
            best = rank;
            next = id;
        }
    }
    if (!next || next == state_.focus_step) return;
    state_.focus_step = next;

    const Step& step = *scenario_->find_step(*next);
    publish(EventType::StepStarted, step.id, {{"part", step.target_part}}, sink);

    if (state_.mode != Mode::Training) return;
    const auto hint = [&](const char* channel, const std::string& text) {
        publish(EventType::HintIssued, step.id, {{"channel", std::string(channel)}, {"text", text}}, sink);
    };
    const auto& h = state_.hints;
    if (h.voice) hint("voice", step.prompt_voice_text);
    if (h.text) hint("text", step.prompt_text);
    if (h.tablet_display) hint("tablet_display", action_to_string(step.action));
    if (h.screen_display) hint("screen_display", action_to_string(step.action));
}

std::optional<ErrorKind> Session::check(const Step& step, const AttemptInput& input) const {
    if (!state_.candidates.count(step.id)) return ErrorKind::WrongOrder;
    if (input.part && *input.part != step.target_part) return ErrorKind::UnknownTarget;
    if (step.required_tool && input.tool != step.required_tool) return ErrorKind::WrongTool;
    if (step.required_torque_nm) {
        std::optional<double> torque = input.torque_nm;
        if (!torque && input.tool) {
            if (const auto* tool = scenario_->find_tool(*input.tool)) torque = tool->torque_nm;
        }
        if (!torque || !torque_matches(*torque, *step.required_torque_nm)) return ErrorKind::WrongTorque;
    }
    if (!(input.action == step.action)) return ErrorKind::WrongAction;
    return std::nullopt;
}

AttemptOutcome Session::attempt(const AttemptInput& input) {
    if (state_.finished) {
        throw SessionError(SessionError::Kind::SessionFinished, "session '" + state_.session_id + "' is finished");
    }
    const Step* step = scenario_->find_step(input.step_id);
    if (!step) throw SessionError(SessionError::Kind::UnknownStep, "unknown step '" + input.step_id + "'");

    AttemptOutcome outcome;
    state_.clock_ms = std::max(state_.clock_ms, input.t_ms);

    Payload performed{{"action", action_to_string(input.action)}};
    if (input.part) performed["part"] = *input.part;
    if (input.tool) performed["tool"] = *input.tool;
    if (input.torque_nm) performed["torque_nm"] = *input.torque_nm;
    publish(EventType::ActionPerformed, step->id, std::move(performed), &outcome.events);

    if (input.tool) {
        HeldTool held{*input.tool, input.torque_nm};
        if (!held.torque_nm) {
            if (const auto* tool = scenario_->find_tool(*input.tool)) held.torque_nm = tool->torque_nm;
        }
        state_.held_tool = std::move(held);
    }

    if (auto error = check(*step, input)) {
        outcome.error = error;
        state_.error_log.push_back({step->id, *error, state_.clock_ms});
        publish(EventType::StepFailed, step->id, {{"error", std::string(to_string(*error))}}, &outcome.events);
        return outcome;
    }

    outcome.accepted = true;
    state_.completed.insert(step->id);
    state_.part_states[step->target_part] = state_after(*step, scenario_->direction);
    recompute_candidates();
    publish(EventType::StepCompleted, step->id, {{"part", step->target_part}}, &outcome.events);

    const auto p = progress();
    publish(EventType::ProgressUpdated, state_.session_id,
            {{"completed", static_cast<std::int64_t>(p.completed)},
             {"total", static_cast<std::int64_t>(p.total)},
             {"fraction", p.fraction}},
            &outcome.events);

    if (state_.completed.size() == scenario_->steps.size()) {
        state_.finished = true;
        state_.focus_step.reset();
        publish(EventType::SessionFinished, state_.session_id, {{"reason", std::string("completed")}},
                &outcome.events);
    } else {
        focus_and_hint(&outcome.events);
    }
    return outcome;
}

void Session::abandon(std::int64_t t_ms) {
    if (state_.finished) {
        throw SessionError(SessionError::Kind::SessionFinished, "session '" + state_.session_id + "' is finished");
    }
    state_.clock_ms = std::max(state_.clock_ms, t_ms);
    state_.finished = true;
    state_.abandoned = true;
    state_.focus_step.reset();
    publish(EventType::SessionFinished, state_.session_id, {{"reason", std::string("abandoned")}}, nullptr);
}

Progress Session::progress() const {
    Progress p;
    p.total = scenario_->steps.size();
    p.completed = state_.completed.size();
    p.fraction = p.total == 0 ? 1.0 : static_cast<double>(p.completed) / static_cast<double>(p.total);

    std::vector<std::string> stage_order;
    for (const auto& st : scenario_->stages) stage_order.push_back(st.id);
    for (const auto& step : scenario_->steps) {
        if (!step.stage.empty() && std::find(stage_order.begin(), stage_order.end(), step.stage) == stage_order.end()) {
            stage_order.push_back(step.stage);
        }
    }
    for (const auto& id : stage_order) {
        std::size_t total = 0, done = 0;
        for (const auto& step : scenario_->steps) {
            if (step.stage != id) continue;
            ++total;
            done += state_.completed.count(step.id);
        }
        p.per_stage.emplace_back(id, total == 0 ? 1.0 : static_cast<double>(done) / static_cast<double>(total));
    }
    return p;
}

Session start_session(std::shared_ptr<const Scenario> scenario, Mode mode, HintConfig hints, ScoringRules rules,
                      std::string session_id) {
    Session session(std::move(scenario), mode, hints, std::move(rules), std::move(session_id));
    session.begin();
    return session;
}

}  // namespace trainer

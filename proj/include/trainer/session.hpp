#pragma once

// Control-layer session state machine shared by training and examination.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trainer/event_bus.hpp"
#include "trainer/scenario.hpp"

namespace trainer {

enum class Mode { Training, Examination };
const char* to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view text);

struct HintConfig {
    bool voice = false;
    bool text = false;
    bool tablet_display = false;
    bool screen_display = false;

    static constexpr HintConfig none() { return {}; }
    static constexpr HintConfig t1() { return {true, false, false, false}; }
    static constexpr HintConfig t2() { return {true, true, true, false}; }
    static constexpr HintConfig t3() { return {true, true, true, true}; }
    /// "T1", "T2", "T3" or "none".
    static HintConfig preset(std::string_view name);

    [[nodiscard]] int enabled_channels() const noexcept {
        return int(voice) + int(text) + int(tablet_display) + int(screen_display);
    }

    friend bool operator==(const HintConfig&, const HintConfig&) = default;
};

Json hints_to_json(const HintConfig& hints);
HintConfig hints_from_json(const Json& j);

enum class ErrorKind { WrongOrder, WrongTool, WrongTorque, WrongAction, UnknownTarget };
inline constexpr ErrorKind kAllErrorKinds[] = {ErrorKind::WrongOrder, ErrorKind::WrongTool, ErrorKind::WrongTorque,
                                               ErrorKind::WrongAction, ErrorKind::UnknownTarget};
const char* to_string(ErrorKind kind) noexcept;
std::optional<ErrorKind> error_kind_from_string(std::string_view text) noexcept;

struct ErrorRecord {
    std::string step_id;
    ErrorKind kind;
    std::int64_t t_ms;

    friend bool operator==(const ErrorRecord&, const ErrorRecord&) = default;
};

struct HeldTool {
    std::string tool_id;
    std::optional<double> torque_nm;

    friend bool operator==(const HeldTool&, const HeldTool&) = default;
};

struct SessionState {
    std::string session_id;
    std::string scenario_id;
    Mode mode = Mode::Training;
    HintConfig hints;  // all-off in examination mode
    std::set<std::string> completed;
    std::set<std::string> candidates;
    std::optional<HeldTool> held_tool;
    std::map<std::string, PartState> part_states;
    std::vector<ErrorRecord> error_log;
    std::int64_t clock_ms = 0;
    std::optional<std::string> focus_step;  // candidate currently hinted
    bool finished = false;
    bool abandoned = false;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// One trainee interaction, as translated by the interaction layer.
struct AttemptInput {
    std::string step_id;
    std::optional<std::string> part;  // part the trainee acted on, when known
    std::optional<std::string> tool;
    std::optional<double> torque_nm;  // defaults to the tool's own setting
    Action action = BasicAction::press();
    std::int64_t t_ms = 0;
};

struct AttemptOutcome {
    bool accepted = false;
    std::optional<ErrorKind> error;
    std::vector<EventMessage> events;
};

struct ScoringRules {
    std::map<std::string, double> points_per_step;
    std::map<ErrorKind, double> deduction_per_error;
    bool floor_at_zero = true;

    /// Equal points summing to 100; deductions 5/5/5/3/2.
    static ScoringRules defaults(const Scenario& scenario);

    [[nodiscard]] double total_points() const;
    [[nodiscard]] double deduction(ErrorKind kind) const;
    [[nodiscard]] Json to_json() const;
    static ScoringRules from_json(const Json& j);
    [[nodiscard]] std::string digest() const;

    friend bool operator==(const ScoringRules&, const ScoringRules&) = default;
};

struct Progress {
    double fraction = 0.0;
    std::size_t completed = 0;
    std::size_t total = 0;
    /// Stage id -> completed fraction, in stage order.
    std::vector<std::pair<std::string, double>> per_stage;
};

struct StageResult {
    std::string id;
    std::string title;
    std::size_t steps = 0;
    std::size_t completed = 0;
    std::size_t errors = 0;
    bool correct = false;

    friend bool operator==(const StageResult&, const StageResult&) = default;
};

struct StepResult {
    std::string id;
    std::string stage;
    bool completed = false;
    std::size_t errors = 0;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct ScoreReport {
    std::string session_id;
    std::string scenario_id;
    Mode mode = Mode::Training;
    bool abandoned = false;
    std::size_t completed_steps = 0;
    std::size_t total_steps = 0;
    double earned_points = 0.0;
    double total_points = 0.0;
    double deductions = 0.0;
    double score = 0.0;
    std::string band;
    std::map<ErrorKind, std::size_t> error_counts;
    std::vector<StageResult> stages;
    std::vector<StepResult> steps;

    [[nodiscard]] Json to_json() const;
    static ScoreReport from_json(const Json& j);
    /// Stage id -> correct, in stage order.
    [[nodiscard]] std::vector<std::pair<std::string, bool>> stage_correctness() const;

    friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

class Session {
public:
    Session(std::shared_ptr<const Scenario> scenario, Mode mode, HintConfig hints, ScoringRules rules,
            std::string session_id);

    /// Throws SessionError::UnknownStep or SessionError::SessionFinished.
    AttemptOutcome attempt(const AttemptInput& input);
    /// Explicit abandonment; finishes the session with whatever was completed.
    void abandon(std::int64_t t_ms);

    [[nodiscard]] Progress progress() const;
    /// Throws SessionError::SessionNotFinished.
    [[nodiscard]] ScoreReport finish_and_score() const;
    [[nodiscard]] ScoreReport finish_and_score(const ScoringRules& rules) const;

    [[nodiscard]] const SessionState& state() const noexcept { return state_; }
    [[nodiscard]] const Scenario& scenario() const noexcept { return *scenario_; }
    [[nodiscard]] const std::shared_ptr<const Scenario>& scenario_ptr() const noexcept { return scenario_; }
    [[nodiscard]] const ScoringRules& rules() const noexcept { return rules_; }
    [[nodiscard]] EventBus& bus() noexcept { return *bus_; }
    [[nodiscard]] const std::vector<EventMessage>& event_log() const noexcept { return bus_->log(); }

private:
    friend Session start_session(std::shared_ptr<const Scenario>, Mode, HintConfig, ScoringRules, std::string);

    void begin();
    void recompute_candidates();
    std::optional<ErrorKind> check(const Step& step, const AttemptInput& input) const;
    void publish(EventType type, std::string target, Payload payload, std::vector<EventMessage>* sink);
    void focus_and_hint(std::vector<EventMessage>* sink);

    std::shared_ptr<const Scenario> scenario_;
    ScoringRules rules_;
    std::map<std::string, std::size_t> topo_rank_;
    SessionState state_;
    std::unique_ptr<EventBus> bus_;
};

/// Validates the scenario (SessionError::InvalidScenario) and emits the opening events.
Session start_session(std::shared_ptr<const Scenario> scenario, Mode mode, HintConfig hints, ScoringRules rules,
                      std::string session_id = "session-1");

/// Re-applies the attempts recorded in `log`. Throws SessionError::LogCorruption.
ScoreReport replay(std::shared_ptr<const Scenario> scenario, Mode mode, const ScoringRules& rules,
                   const std::vector<EventMessage>& log, std::string session_id = "session-1");

/// Persisted form of one finished session.
struct SessionRecord {
    std::string session_id;
    std::string scenario_id;
    std::string student_id;
    std::string group;
    Mode mode = Mode::Training;
    HintConfig hints;
    ScoringRules rules;
    std::vector<EventMessage> events;
    ScoreReport report;

    [[nodiscard]] Json to_json() const;
    static SessionRecord from_json(const Json& j);
    static SessionRecord parse(std::string_view document);
    [[nodiscard]] std::string serialize() const { return to_canonical(to_json()); }

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

SessionRecord make_record(const Session& session, std::string student_id, std::string group);

/// Replays a record against its scenario. Throws SessionError::LogCorruption.
ScoreReport replay_record(std::shared_ptr<const Scenario> scenario, const SessionRecord& record);

}  // namespace trainer

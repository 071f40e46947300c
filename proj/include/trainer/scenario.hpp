#pragma once

// Entity layer: parts, tools, actions and the procedures built from them.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trainer/canonical_json.hpp"

namespace trainer {

/// Positive rational kept in lowest terms.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1);

    [[nodiscard]] std::int64_t numerator() const noexcept { return num_; }
    [[nodiscard]] std::int64_t denominator() const noexcept { return den_; }
    [[nodiscard]] double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] std::string to_string() const;
    static Rational parse(std::string_view text);

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    std::int64_t num_ = 1;
    std::int64_t den_ = 1;
};

enum class ActionKind { Rotate, Press, Hold, Hide };
enum class RotateDirection { Clockwise, CounterClockwise };

struct BasicAction {
    ActionKind kind = ActionKind::Press;
    // Rotate
    RotateDirection direction = RotateDirection::Clockwise;
    Rational turns;
    // Hold
    std::int64_t min_duration_ms = 0;
    // Hide; true means the inverse (restore visibility)
    bool show = false;

    static BasicAction rotate(RotateDirection dir, Rational turns);
    static BasicAction press();
    static BasicAction hold(std::int64_t min_duration_ms = 0);
    static BasicAction hide();
    static BasicAction reveal();

    [[nodiscard]] BasicAction inverse() const;

    friend bool operator==(const BasicAction& a, const BasicAction& b);
};

struct CompositeAction {
    std::string name;
    std::vector<BasicAction> sequence;

    friend bool operator==(const CompositeAction&, const CompositeAction&) = default;
};

using Action = std::variant<BasicAction, CompositeAction>;

/// Compact one-line form used in event payloads, e.g. `screw=rotate:cw:3;press`.
std::string action_to_string(const Action& action);
Action action_from_string(std::string_view text);

/// Scenario-file JSON form of an action (basic object or {composite, sequence}).
Action action_from_json(const Json& j);
Json action_to_json(const Action& action);

/// Registry of named composites and their inverses.
class CompositeLibrary {
public:
    /// screw/unscrew and lift/place.
    static const CompositeLibrary& standard();

    void add_pair(const std::string& name, const std::string& inverse_name);
    [[nodiscard]] std::optional<std::string> inverse_name(const std::string& name) const;

    /// Inverse composite: reversed sequence with every basic action inverted.
    [[nodiscard]] CompositeAction invert(const CompositeAction& composite) const;

    static CompositeAction screw(Rational turns);
    static CompositeAction unscrew(Rational turns);

private:
    std::map<std::string, std::string> inverse_;
};

enum class PartCategory { Fastener, Component, Assembly };
enum class PartState { Installed, Removed, Hidden };
enum class Direction { Assembly, Disassembly };

const char* to_string(PartCategory v) noexcept;
const char* to_string(PartState v) noexcept;
const char* to_string(Direction v) noexcept;
const char* to_string(ActionKind v) noexcept;

struct Part {
    std::string id;
    std::string display_name;
    PartCategory category = PartCategory::Component;
    PartState initial_state = PartState::Installed;

    friend bool operator==(const Part&, const Part&) = default;
};

struct Tool {
    std::string id;
    std::string display_name;
    std::optional<double> torque_nm;
    std::int64_t slot = 0;

    friend bool operator==(const Tool&, const Tool&) = default;
};

struct Stage {
    std::string id;
    std::string title;

    friend bool operator==(const Stage&, const Stage&) = default;
};

struct Step {
    std::string id;
    std::string stage;
    std::string target_part;
    std::optional<std::string> required_tool;
    std::optional<double> required_torque_nm;
    Action action = BasicAction::press();
    std::set<std::string> prerequisites;
    std::string prompt_text;
    std::string prompt_voice_text;

    friend bool operator==(const Step&, const Step&) = default;
};

struct TutorialEntry {
    std::string title;
    std::string body;
    std::optional<std::string> media;

    friend bool operator==(const TutorialEntry&, const TutorialEntry&) = default;
};

struct Scenario {
    static constexpr int kFormat = 1;

    std::string id;
    std::string engine_name;
    Direction direction = Direction::Disassembly;
    std::vector<Part> parts;
    std::vector<Tool> tools;
    std::vector<Stage> stages;
    std::vector<Step> steps;
    std::vector<TutorialEntry> tutorial;

    [[nodiscard]] const Step* find_step(std::string_view step_id) const;
    [[nodiscard]] const Part* find_part(std::string_view part_id) const;
    [[nodiscard]] const Tool* find_tool(std::string_view tool_id) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    enum class Code { DuplicateId, DanglingReference, Cycle, InvalidValue };

    Severity severity = Severity::Error;
    Code code = Code::InvalidValue;
    std::string location;  // e.g. "steps[3].requires"
    std::string message;
    std::vector<std::string> ids;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Throws ScenarioError (syntax, schema, reference, cycle).
Scenario parse_scenario(std::string_view document);
Scenario scenario_from_json(const Json& doc);
Json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

std::vector<Diagnostic> validate_scenario(const Scenario& scenario);

/// Kahn's algorithm; among ready steps the earliest authored one goes first.
std::vector<std::string> topological_order(const Scenario& scenario);

/// Opposite-direction procedure. Throws ScenarioError::MissingInverse.
Scenario invert_scenario(const Scenario& scenario,
                         const CompositeLibrary& library = CompositeLibrary::standard());

/// Part state after `step` completes in a scenario of the given direction.
PartState state_after(const Step& step, Direction direction);

}  // namespace trainer

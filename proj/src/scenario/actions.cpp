#include <charconv>
#include <numeric>

#include "trainer/error.hpp"
#include "trainer/scenario.hpp"

namespace trainer {

namespace {

ScenarioError schema_error(std::string message) {
    return ScenarioError(ScenarioError::Kind::Schema, std::move(message));
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw schema_error("malformed " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string basic_to_string(const BasicAction& a) {
    switch (a.kind) {
        case ActionKind::Rotate:
            return std::string("rotate:") + (a.direction == RotateDirection::Clockwise ? "cw" : "ccw") + ":" +
                   a.turns.to_string();
        case ActionKind::Press:
            return "press";
        case ActionKind::Hold:
            return "hold:" + std::to_string(a.min_duration_ms);
        case ActionKind::Hide:
            return a.show ? "show" : "hide";
    }
    return {};
}

BasicAction basic_from_string(std::string_view text) {
    auto fields = split(text, ':');
    const auto head = fields.front();
    if (head == "press" && fields.size() == 1) return BasicAction::press();
    if (head == "hide" && fields.size() == 1) return BasicAction::hide();
    if (head == "show" && fields.size() == 1) return BasicAction::reveal();
    if (head == "hold" && fields.size() <= 2) {
        return BasicAction::hold(fields.size() == 2 ? parse_int(fields[1], "hold duration") : 0);
    }
    if (head == "rotate" && fields.size() == 3) {
        RotateDirection dir;
        if (fields[1] == "cw") {
            dir = RotateDirection::Clockwise;
        } else if (fields[1] == "ccw") {
            dir = RotateDirection::CounterClockwise;
        } else {
            throw schema_error("unknown rotation direction '" + std::string(fields[1]) + "'");
        }
        return BasicAction::rotate(dir, Rational::parse(fields[2]));
    }
    throw schema_error("unknown action '" + std::string(text) + "'");
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
    if (numerator <= 0 || denominator <= 0) {
        throw schema_error("rational must be positive: " + std::to_string(numerator) + "/" +
                           std::to_string(denominator));
    }
    const auto g = std::gcd(numerator, denominator);
    num_ = numerator / g;
    den_ = denominator / g;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, "rational"));
    return Rational(parse_int(text.substr(0, slash), "rational"), parse_int(text.substr(slash + 1), "rational"));
}

BasicAction BasicAction::rotate(RotateDirection dir, Rational turns) {
    BasicAction a;
    a.kind = ActionKind::Rotate;
    a.direction = dir;
    a.turns = turns;
    return a;
}

BasicAction BasicAction::press() { return BasicAction{}; }

BasicAction BasicAction::hold(std::int64_t min_duration_ms) {
    if (min_duration_ms < 0) throw schema_error("hold duration must be >= 0");
    BasicAction a;
    a.kind = ActionKind::Hold;
    a.min_duration_ms = min_duration_ms;
    return a;
}

BasicAction BasicAction::hide() {
    BasicAction a;
    a.kind = ActionKind::Hide;
    return a;
}

BasicAction BasicAction::reveal() {
    BasicAction a = hide();
    a.show = true;
    return a;
}

BasicAction BasicAction::inverse() const {
    switch (kind) {
        case ActionKind::Rotate:
            return rotate(direction == RotateDirection::Clockwise ? RotateDirection::CounterClockwise
                                                                  : RotateDirection::Clockwise,
                          turns);
        case ActionKind::Hide:
            return show ? hide() : reveal();
        case ActionKind::Press:
        case ActionKind::Hold:
            return *this;
    }
    return *this;
}

bool operator==(const BasicAction& a, const BasicAction& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ActionKind::Rotate:
            return a.direction == b.direction && a.turns == b.turns;
        case ActionKind::Hold:
            return a.min_duration_ms == b.min_duration_ms;
        case ActionKind::Hide:
            return a.show == b.show;
        case ActionKind::Press:
            return true;
    }
    return false;
}

std::string action_to_string(const Action& action) {
    if (const auto* basic = std::get_if<BasicAction>(&action)) return basic_to_string(*basic);
    const auto& composite = std::get<CompositeAction>(action);
    std::string out = composite.name + "=";
    for (std::size_t i = 0; i < composite.sequence.size(); ++i) {
        if (i) out += ';';
        out += basic_to_string(composite.sequence[i]);
    }
    return out;
}

Action action_from_string(std::string_view text) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos) return basic_from_string(text);
    CompositeAction composite;
    composite.name = std::string(text.substr(0, eq));
    if (composite.name.empty()) throw schema_error("composite action without a name");
    auto body = text.substr(eq + 1);
    if (body.empty()) throw schema_error("composite '" + composite.name + "' has an empty sequence");
    for (auto part : split(body, ';')) composite.sequence.push_back(basic_from_string(part));
    return composite;
}

const CompositeLibrary& CompositeLibrary::standard() {
    static const CompositeLibrary lib = [] {
        CompositeLibrary l;
        l.add_pair("screw", "unscrew");
        l.add_pair("lift", "place");
        return l;
    }();
    return lib;
}

void CompositeLibrary::add_pair(const std::string& name, const std::string& inverse_name) {
    inverse_[name] = inverse_name;
    inverse_[inverse_name] = name;
}

std::optional<std::string> CompositeLibrary::inverse_name(const std::string& name) const {
    auto it = inverse_.find(name);
    if (it == inverse_.end()) return std::nullopt;
    return it->second;
}

CompositeAction CompositeLibrary::invert(const CompositeAction& composite) const {
    auto name = inverse_name(composite.name);
    if (!name) {
        throw ScenarioError(ScenarioError::Kind::MissingInverse,
                            "composite '" + composite.name + "' has no registered inverse", {composite.name});
    }
    CompositeAction out{*name, {}};
    for (auto it = composite.sequence.rbegin(); it != composite.sequence.rend(); ++it) {
        out.sequence.push_back(it->inverse());
    }
    return out;
}

CompositeAction CompositeLibrary::screw(Rational turns) {
    return {"screw", {BasicAction::rotate(RotateDirection::Clockwise, turns), BasicAction::press()}};
}

CompositeAction CompositeLibrary::unscrew(Rational turns) {
    return {"unscrew", {BasicAction::press(), BasicAction::rotate(RotateDirection::CounterClockwise, turns)}};
}

PartState state_after(const Step& step, Direction direction) {
    const auto hidden_by = [](const BasicAction& a) -> std::optional<PartState> {
        if (a.kind != ActionKind::Hide) return std::nullopt;
        return a.show ? PartState::Installed : PartState::Hidden;
    };
    std::optional<PartState> last;
    if (const auto* basic = std::get_if<BasicAction>(&step.action)) {
        last = hidden_by(*basic);
    } else {
        for (const auto& a : std::get<CompositeAction>(step.action).sequence) {
            if (auto s = hidden_by(a)) last = s;
        }
    }
    if (last) return *last;
    return direction == Direction::Disassembly ? PartState::Removed : PartState::Installed;
}

const char* to_string(ActionKind v) noexcept {
    switch (v) {
        case ActionKind::Rotate: return "rotate";
        case ActionKind::Press: return "press";
        case ActionKind::Hold: return "hold";
        case ActionKind::Hide: return "hide";
    }
    return "?";
}

const char* to_string(PartCategory v) noexcept {
    switch (v) {
        case PartCategory::Fastener: return "fastener";
        case PartCategory::Component: return "component";
        case PartCategory::Assembly: return "assembly";
    }
    return "?";
}

const char* to_string(PartState v) noexcept {
    switch (v) {
        case PartState::Installed: return "installed";
        case PartState::Removed: return "removed";
        case PartState::Hidden: return "hidden";
    }
    return "?";
}

const char* to_string(Direction v) noexcept {
    return v == Direction::Assembly ? "assembly" : "disassembly";
}

const char* to_string(ScenarioError::Kind kind) noexcept {
    switch (kind) {
        case ScenarioError::Kind::Syntax: return "syntax";
        case ScenarioError::Kind::Schema: return "schema";
        case ScenarioError::Kind::Reference: return "reference";
        case ScenarioError::Kind::Cycle: return "cycle";
        case ScenarioError::Kind::MissingInverse: return "missing-inverse";
    }
    return "?";
}

}  // namespace trainer

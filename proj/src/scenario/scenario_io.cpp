#include <algorithm>

#include "trainer/error.hpp"
#include "trainer/scenario.hpp"

namespace trainer {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::Schema, where + ": " + what);
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) schema(where, "expected an object");
    for (const char* key : required) {
        if (!obj.contains(key)) schema(where, std::string("missing field '") + key + "'");
    }
    for (const auto& item : obj.items()) {
        const auto& key = item.key();
        auto match = [&](const char* k) { return key == k; };
        if (std::none_of(required.begin(), required.end(), match) &&
            std::none_of(optional.begin(), optional.end(), match)) {
            schema(where, "unknown field '" + key + "'");
        }
    }
}

std::string get_string(const Json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) schema(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string get_id(const Json& obj, const char* key, const std::string& where) {
    auto s = get_string(obj, key, where);
    if (s.empty()) schema(where + "." + key, "identifier must be non-empty");
    return s;
}

double get_positive(const Json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) schema(where + "." + key, "expected a number");
    double d = v.get<double>();
    if (!(d > 0.0)) schema(where + "." + key, "must be > 0");
    return d;
}

template <typename Enum, std::size_t N>
Enum get_enum(const Json& obj, const char* key, const std::string& where,
              const std::pair<const char*, Enum> (&table)[N]) {
    auto s = get_string(obj, key, where);
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    schema(where + "." + key, "unknown value '" + s + "'");
}

constexpr std::pair<const char*, PartCategory> kCategories[] = {
    {"fastener", PartCategory::Fastener}, {"component", PartCategory::Component}, {"assembly", PartCategory::Assembly}};
constexpr std::pair<const char*, PartState> kStates[] = {
    {"installed", PartState::Installed}, {"removed", PartState::Removed}, {"hidden", PartState::Hidden}};
constexpr std::pair<const char*, Direction> kDirections[] = {
    {"assembly", Direction::Assembly}, {"disassembly", Direction::Disassembly}};
constexpr std::pair<const char*, RotateDirection> kRotations[] = {
    {"cw", RotateDirection::Clockwise}, {"ccw", RotateDirection::CounterClockwise}};

BasicAction basic_from_json(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) schema(where, "missing field 'kind'");
    auto kind = get_string(j, "kind", where);
    if (kind == "rotate") {
        check_keys(j, where, {"kind", "direction", "turns"});
        const auto& t = j.at("turns");
        Rational turns;
        try {
            if (t.is_number_integer()) {
                turns = Rational(t.get<std::int64_t>());
            } else if (t.is_string()) {
                turns = Rational::parse(t.get<std::string>());
            } else {
                schema(where + ".turns", "expected an integer or \"n/d\" string");
            }
        } catch (const ScenarioError& e) {
            if (e.kind() != ScenarioError::Kind::Schema) throw;
            schema(where + ".turns", e.what());
        }
        return BasicAction::rotate(get_enum(j, "direction", where, kRotations), turns);
    }
    if (kind == "press") {
        check_keys(j, where, {"kind"});
        return BasicAction::press();
    }
    if (kind == "hold") {
        check_keys(j, where, {"kind"}, {"min_ms"});
        std::int64_t ms = 0;
        if (j.contains("min_ms")) {
            const auto& v = j.at("min_ms");
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) schema(where + ".min_ms", "must be an integer >= 0");
            ms = v.get<std::int64_t>();
        }
        return BasicAction::hold(ms);
    }
    if (kind == "hide") {
        check_keys(j, where, {"kind"}, {"show"});
        if (j.contains("show")) {
            if (!j.at("show").is_boolean()) schema(where + ".show", "expected a boolean");
            if (j.at("show").get<bool>()) return BasicAction::reveal();
        }
        return BasicAction::hide();
    }
    schema(where + ".kind", "unknown action kind '" + kind + "'");
}

Json basic_to_json(const BasicAction& a) {
    Json j;
    j["kind"] = to_string(a.kind);
    switch (a.kind) {
        case ActionKind::Rotate:
            j["direction"] = a.direction == RotateDirection::Clockwise ? "cw" : "ccw";
            if (a.turns.denominator() == 1) {
                j["turns"] = a.turns.numerator();
            } else {
                j["turns"] = a.turns.to_string();
            }
            break;
        case ActionKind::Hold:
            j["min_ms"] = a.min_duration_ms;
            break;
        case ActionKind::Hide:
            if (a.show) j["show"] = true;
            break;
        case ActionKind::Press:
            break;
    }
    return j;
}

Action parse_action(const Json& j, const std::string& where) {
    if (j.is_object() && j.contains("composite")) {
        check_keys(j, where, {"composite", "sequence"});
        CompositeAction c;
        c.name = get_id(j, "composite", where);
        const auto& seq = j.at("sequence");
        if (!seq.is_array() || seq.empty()) schema(where + ".sequence", "expected a non-empty array");
        for (std::size_t i = 0; i < seq.size(); ++i) {
            c.sequence.push_back(basic_from_json(seq[i], where + ".sequence[" + std::to_string(i) + "]"));
        }
        return c;
    }
    return basic_from_json(j, where);
}

}  // namespace

Json action_to_json(const Action& action) {
    if (const auto* basic = std::get_if<BasicAction>(&action)) return basic_to_json(*basic);
    const auto& c = std::get<CompositeAction>(action);
    Json seq = Json::array();
    for (const auto& a : c.sequence) seq.push_back(basic_to_json(a));
    return Json{{"composite", c.name}, {"sequence", std::move(seq)}};
}

Action action_from_json(const Json& j) { return parse_action(j, "action"); }

namespace {

const Json& get_array(const Json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_array()) schema(key, "expected an array");
    return v;
}

}  // namespace

Scenario scenario_from_json(const Json& doc) {
    check_keys(doc, "$", {"format", "id", "engine_name", "direction", "parts", "tools", "steps", "tutorial"},
               {"stages"});
    const auto& format = doc.at("format");
    if (!format.is_number_integer() || format.get<int>() != Scenario::kFormat) {
        schema("format", "unsupported format version (expected 1)");
    }

    Scenario s;
    s.id = get_id(doc, "id", "$");
    s.engine_name = get_string(doc, "engine_name", "$");
    s.direction = get_enum(doc, "direction", "$", kDirections);

    const auto& parts = get_array(doc, "parts");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto where = "parts[" + std::to_string(i) + "]";
        check_keys(parts[i], where, {"id", "name", "category", "initial_state"});
        s.parts.push_back(Part{get_id(parts[i], "id", where), get_string(parts[i], "name", where),
                               get_enum(parts[i], "category", where, kCategories),
                               get_enum(parts[i], "initial_state", where, kStates)});
    }

    const auto& tools = get_array(doc, "tools");
    for (std::size_t i = 0; i < tools.size(); ++i) {
        const auto where = "tools[" + std::to_string(i) + "]";
        check_keys(tools[i], where, {"id", "name", "slot"}, {"torque_nm"});
        Tool t{get_id(tools[i], "id", where), get_string(tools[i], "name", where), std::nullopt, 0};
        if (tools[i].contains("torque_nm")) t.torque_nm = get_positive(tools[i], "torque_nm", where);
        const auto& slot = tools[i].at("slot");
        if (!slot.is_number_integer() || slot.get<std::int64_t>() < 0) schema(where + ".slot", "must be an integer >= 0");
        t.slot = slot.get<std::int64_t>();
        s.tools.push_back(std::move(t));
    }

    if (doc.contains("stages")) {
        const auto& stages = get_array(doc, "stages");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const auto where = "stages[" + std::to_string(i) + "]";
            check_keys(stages[i], where, {"id", "title"});
            s.stages.push_back(Stage{get_id(stages[i], "id", where), get_string(stages[i], "title", where)});
        }
    }

    const auto& steps = get_array(doc, "steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto where = "steps[" + std::to_string(i) + "]";
        const auto& j = steps[i];
        check_keys(j, where, {"id", "part", "action", "requires", "prompt_text", "prompt_voice"},
                   {"stage", "tool", "torque_nm"});
        Step step;
        step.id = get_id(j, "id", where);
        if (j.contains("stage")) step.stage = get_id(j, "stage", where);
        step.target_part = get_id(j, "part", where);
        if (j.contains("tool")) step.required_tool = get_id(j, "tool", where);
        if (j.contains("torque_nm")) step.required_torque_nm = get_positive(j, "torque_nm", where);
        step.action = parse_action(j.at("action"), where + ".action");
        const auto& req = j.at("requires");
        if (!req.is_array()) schema(where + ".requires", "expected an array");
        for (const auto& r : req) {
            if (!r.is_string() || r.get<std::string>().empty()) schema(where + ".requires", "expected step ids");
            step.prerequisites.insert(r.get<std::string>());
        }
        step.prompt_text = get_string(j, "prompt_text", where);
        step.prompt_voice_text = get_string(j, "prompt_voice", where);
        s.steps.push_back(std::move(step));
    }

    const auto& tutorial = get_array(doc, "tutorial");
    for (std::size_t i = 0; i < tutorial.size(); ++i) {
        const auto where = "tutorial[" + std::to_string(i) + "]";
        check_keys(tutorial[i], where, {"title", "body"}, {"media"});
        TutorialEntry e{get_string(tutorial[i], "title", where), get_string(tutorial[i], "body", where), std::nullopt};
        if (tutorial[i].contains("media")) e.media = get_string(tutorial[i], "media", where);
        s.tutorial.push_back(std::move(e));
    }
    return s;
}

Scenario parse_scenario(std::string_view document) {
    Json doc;
    try {
        doc = Json::parse(document.begin(), document.end());
    } catch (const Json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::Syntax,
                            "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    Scenario s = scenario_from_json(doc);

    // Report the first error-severity diagnostic using the error class of its code.
    for (const auto& d : validate_scenario(s)) {
        if (d.severity != Diagnostic::Severity::Error) continue;
        switch (d.code) {
            case Diagnostic::Code::DanglingReference:
                throw ScenarioError(ScenarioError::Kind::Reference, d.location + ": " + d.message, d.ids);
            case Diagnostic::Code::Cycle:
                throw ScenarioError(ScenarioError::Kind::Cycle, d.location + ": " + d.message, d.ids);
            case Diagnostic::Code::DuplicateId:
            case Diagnostic::Code::InvalidValue:
                throw ScenarioError(ScenarioError::Kind::Schema, d.location + ": " + d.message, d.ids);
        }
    }
    return s;
}

Json scenario_to_json(const Scenario& s) {
    Json doc;
    doc["format"] = Scenario::kFormat;
    doc["id"] = s.id;
    doc["engine_name"] = s.engine_name;
    doc["direction"] = to_string(s.direction);

    doc["parts"] = Json::array();
    for (const auto& p : s.parts) {
        doc["parts"].push_back(
            {{"id", p.id}, {"name", p.display_name}, {"category", to_string(p.category)},
             {"initial_state", to_string(p.initial_state)}});
    }
    doc["tools"] = Json::array();
    for (const auto& t : s.tools) {
        Json j{{"id", t.id}, {"name", t.display_name}, {"slot", t.slot}};
        if (t.torque_nm) j["torque_nm"] = *t.torque_nm;
        doc["tools"].push_back(std::move(j));
    }
    if (!s.stages.empty()) {
        doc["stages"] = Json::array();
        for (const auto& st : s.stages) doc["stages"].push_back({{"id", st.id}, {"title", st.title}});
    }
    doc["steps"] = Json::array();
    for (const auto& step : s.steps) {
        Json j{{"id", step.id},
               {"part", step.target_part},
               {"action", action_to_json(step.action)},
               {"requires", Json(std::vector<std::string>(step.prerequisites.begin(), step.prerequisites.end()))},
               {"prompt_text", step.prompt_text},
               {"prompt_voice", step.prompt_voice_text}};
        if (!step.stage.empty()) j["stage"] = step.stage;
        if (step.required_tool) j["tool"] = *step.required_tool;
        if (step.required_torque_nm) j["torque_nm"] = *step.required_torque_nm;
        doc["steps"].push_back(std::move(j));
    }
    doc["tutorial"] = Json::array();
    for (const auto& e : s.tutorial) {
        Json j{{"title", e.title}, {"body", e.body}};
        if (e.media) j["media"] = *e.media;
        doc["tutorial"].push_back(std::move(j));
    }
    return doc;
}

std::string serialize_scenario(const Scenario& scenario) { return to_canonical(scenario_to_json(scenario)); }

const Step* Scenario::find_step(std::string_view step_id) const {
    for (const auto& s : steps) {
        if (s.id == step_id) return &s;
    }
    return nullptr;
}

const Part* Scenario::find_part(std::string_view part_id) const {
    for (const auto& p : parts) {
        if (p.id == part_id) return &p;
    }
    return nullptr;
}

const Tool* Scenario::find_tool(std::string_view tool_id) const {
    for (const auto& t : tools) {
        if (t.id == tool_id) return &t;
    }
    return nullptr;
}

}  // namespace trainer

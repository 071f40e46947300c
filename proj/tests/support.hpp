#pragma once

// Shared test helpers: corpus paths and a seeded trainee model with its own
// accept/reject oracle (no calls into the engine's validation).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trainer/scenario.hpp"
#include "trainer/session.hpp"

namespace testsupport {

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(TRAINER_SOURCE_DIR) / rel;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const trainer::Scenario> load_scenario(const std::string& rel) {
    return std::make_shared<const trainer::Scenario>(trainer::parse_scenario(read_text(source_path(rel))));
}

inline std::shared_ptr<const trainer::Scenario> fixture() {
    static const auto s = load_scenario("fixtures/scenarios/verano-s1-s7.json");
    return s;
}

struct ScriptedAttempt {
    trainer::AttemptInput input;
    bool abandon = false;
    std::optional<trainer::ErrorKind> expected;  // oracle verdict; nullopt = accept
};

/// Correct attempt for `step`, with optional fields sometimes left out.
inline trainer::AttemptInput correct_attempt(const trainer::Scenario& s, const trainer::Step& step, std::mt19937_64& rng) {
    trainer::AttemptInput in;
    in.step_id = step.id;
    in.action = step.action;
    if (rng() % 2) in.part = step.target_part;
    if (step.required_tool) {
        in.tool = step.required_tool;
        const trainer::Tool* tool = nullptr;
        for (const auto& t : s.tools) {
            if (t.id == *step.required_tool) tool = &t;
        }
        const bool preset = tool && tool->torque_nm && step.required_torque_nm && *tool->torque_nm == *step.required_torque_nm;
        if (step.required_torque_nm && (!preset || rng() % 2)) in.torque_nm = step.required_torque_nm;
    }
    return in;
}

/// Seeded sequence of attempts a trainee might make; decisions come from a brute-force
/// candidate set recomputed from scratch each time.
inline std::vector<ScriptedAttempt> random_script(const trainer::Scenario& s, std::uint64_t seed,
                                                  std::size_t max_attempts = 60) {
    using trainer::ErrorKind;
    std::mt19937_64 rng(seed);
    std::set<std::string> done;
    std::vector<ScriptedAttempt> script;
    std::int64_t t = 0;

    const auto candidates = [&] {
        std::vector<const trainer::Step*> out;
        for (const auto& st : s.steps) {
            if (done.count(st.id)) continue;
            bool ready = true;
            for (const auto& p : st.prerequisites) ready = ready && done.count(p);
            if (ready) out.push_back(&st);
        }
        return out;
    };

    while (script.size() < max_attempts && done.size() < s.steps.size()) {
        t += 100 + static_cast<std::int64_t>(rng() % 1900);
        if (rng() % 100 < 2) {
            ScriptedAttempt a;
            a.abandon = true;
            a.input.t_ms = t;
            script.push_back(a);
            return script;
        }
        auto cands = candidates();
        const auto& step = *cands[rng() % cands.size()];
        ScriptedAttempt a;
        a.input = correct_attempt(s, step, rng);
        a.input.t_ms = t;

        switch (rng() % 10) {
            case 0: {  // any non-candidate step
                std::vector<const trainer::Step*> others;
                for (const auto& st : s.steps) {
                    if (std::find(cands.begin(), cands.end(), &st) == cands.end()) others.push_back(&st);
                }
                if (others.empty()) break;
                const auto& wrong = *others[rng() % others.size()];
                a.input = correct_attempt(s, wrong, rng);
                a.input.t_ms = t;
                a.expected = ErrorKind::WrongOrder;
                break;
            }
            case 1:
                if (s.parts.size() < 2) break;
                for (const auto& p : s.parts) {
                    if (p.id != step.target_part) a.input.part = p.id;
                }
                a.expected = ErrorKind::UnknownTarget;
                break;
            case 2:
                if (!step.required_tool) break;
                if (rng() % 2 || s.tools.size() < 2) {
                    a.input.tool.reset();
                    a.input.torque_nm.reset();
                } else {
                    for (const auto& tool : s.tools) {
                        if (tool.id != *step.required_tool) a.input.tool = tool.id;
                    }
                }
                a.expected = ErrorKind::WrongTool;
                break;
            case 3:
                if (!step.required_torque_nm) break;
                a.input.torque_nm = *step.required_torque_nm - 15.0;
                a.expected = ErrorKind::WrongTorque;
                break;
            case 4: {
                const bool is_press = std::holds_alternative<trainer::BasicAction>(step.action) &&
                                      std::get<trainer::BasicAction>(step.action).kind == trainer::ActionKind::Press;
                a.input.action = is_press ? trainer::BasicAction::hide() : trainer::BasicAction::press();
                a.expected = ErrorKind::WrongAction;
                break;
            }
            default:
                break;
        }
        if (!a.expected) done.insert(a.input.step_id);
        script.push_back(a);
    }
    if (done.size() < s.steps.size()) {
        ScriptedAttempt a;
        a.abandon = true;
        a.input.t_ms = t + 1;
        script.push_back(a);
    }
    return script;
}

struct ScriptRun {
    std::vector<bool> decisions;
    std::vector<std::optional<trainer::ErrorKind>> errors;
    trainer::ScoreReport report;
    std::vector<trainer::EventMessage> log;
};

inline ScriptRun run_script(std::shared_ptr<const trainer::Scenario> s, const std::vector<ScriptedAttempt>& script,
                            trainer::Mode mode, trainer::HintConfig hints = trainer::HintConfig::t3()) {
    auto rules = trainer::ScoringRules::defaults(*s);
    auto session = trainer::start_session(s, mode, hints, rules, "prop");
    ScriptRun run;
    for (const auto& a : script) {
        if (a.abandon) {
            session.abandon(a.input.t_ms);
            break;
        }
        auto out = session.attempt(a.input);
        run.decisions.push_back(out.accepted);
        run.errors.push_back(out.error);
    }
    run.report = session.finish_and_score();
    run.log = session.event_log();
    return run;
}

}  // namespace testsupport

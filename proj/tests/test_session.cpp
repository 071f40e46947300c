#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "trainer/error.hpp"
#include "trainer/session.hpp"

using namespace trainer;
using testsupport::fixture;

namespace {

std::size_t count_type(const std::vector<EventMessage>& log, EventType type) {
    return static_cast<std::size_t>(
        std::count_if(log.begin(), log.end(), [&](const EventMessage& m) { return m.type == type; }));
}

Session fresh(Mode mode = Mode::Training, HintConfig hints = HintConfig::t3()) {
    auto s = fixture();
    return start_session(s, mode, hints, ScoringRules::defaults(*s), "t-1");
}

AttemptInput correct(const Step& step) {
    AttemptInput in;
    in.step_id = step.id;
    in.action = step.action;
    in.tool = step.required_tool;
    in.torque_nm = step.required_torque_nm;
    return in;
}

// Completes the fixture in topological order, optionally injecting one failure first.
void perfect_run(Session& session, std::int64_t t0 = 0) {
    std::int64_t t = t0;
    for (const auto& id : topological_order(session.scenario())) {
        auto in = correct(*session.scenario().find_step(id));
        in.t_ms = t += 500;
        REQUIRE(session.attempt(in).accepted);
    }
}

std::shared_ptr<const Scenario> empty_scenario() {
    return testsupport::load_scenario("tests/corpus/valid/empty-steps.json");
}

}  // namespace

TEST_CASE("hint presets") {
    CHECK(HintConfig::t1().enabled_channels() == 1);
    CHECK(HintConfig::t2().enabled_channels() == 3);
    CHECK(HintConfig::t3().enabled_channels() == 4);
    CHECK(HintConfig::t2() == HintConfig{true, true, true, false});
    CHECK(HintConfig::preset("T3") == HintConfig::t3());
    CHECK_THROWS_AS(HintConfig::preset("T4"), Error);
}

TEST_CASE("start: training T3 issues one hint per channel for the first S1 step") {
    auto session = fresh();
    const auto& log = session.event_log();
    CHECK(count_type(log, EventType::HintIssued) == 4);
    std::set<std::string> channels;
    for (const auto& m : log) {
        if (m.type != EventType::HintIssued) continue;
        CHECK(m.target == "s1-gear");
        channels.insert(std::get<std::string>(m.payload.at("channel")));
    }
    CHECK(channels == std::set<std::string>{"voice", "text", "tablet_display", "screen_display"});
    CHECK(session.state().candidates == std::set<std::string>{"s1-gear", "s1-toolbox"});
    for (const auto& p : session.scenario().parts) CHECK(session.state().part_states.at(p.id) == p.initial_state);
}

TEST_CASE("start: examination ignores the hint config") {
    auto session = fresh(Mode::Examination, HintConfig::t3());
    CHECK(count_type(session.event_log(), EventType::HintIssued) == 0);
    CHECK(session.state().hints == HintConfig::none());
}

TEST_CASE("start: empty scenario finishes immediately") {
    auto s = empty_scenario();
    auto session = start_session(s, Mode::Training, HintConfig::t1(), ScoringRules::defaults(*s), "e");
    CHECK(session.state().finished);
    REQUIRE(session.event_log().size() == 1);
    CHECK(session.event_log()[0].type == EventType::SessionFinished);
    CHECK(session.progress().fraction == 1.0);
}

TEST_CASE("start: invalid scenario is refused") {
    auto s = std::make_shared<Scenario>(*fixture());
    s->steps[0].prerequisites.insert(s->steps.back().id);  // closes a cycle
    try {
        start_session(s, Mode::Training, HintConfig::t1(), ScoringRules::defaults(*s));
        FAIL("expected invalid-scenario");
    } catch (const SessionError& e) {
        CHECK(e.kind() == SessionError::Kind::InvalidScenario);
    }
}

TEST_CASE("attempt: happy path shows 1 of N progress") {
    auto session = fresh();
    auto out = session.attempt(correct(*session.scenario().find_step("s1-gear")));
    CHECK(out.accepted);
    CHECK_FALSE(out.error);
    auto it = std::find_if(out.events.begin(), out.events.end(),
                           [](const EventMessage& m) { return m.type == EventType::ProgressUpdated; });
    REQUIRE(it != out.events.end());
    CHECK(std::get<std::int64_t>(it->payload.at("completed")) == 1);
    CHECK(std::get<std::int64_t>(it->payload.at("total")) == 15);
}

TEST_CASE("attempt: incomplete prerequisite is wrong-order") {
    auto session = fresh();
    auto out = session.attempt(correct(*session.scenario().find_step("s3-cover")));
    CHECK_FALSE(out.accepted);
    CHECK(out.error == ErrorKind::WrongOrder);
    CHECK(count_type(out.events, EventType::StepFailed) == 1);
    CHECK(session.state().error_log.size() == 1);
}

TEST_CASE("attempt: 20 N·m on the 35 N·m step is wrong-torque") {
    auto session = fresh();
    for (const char* id : {"s1-gear", "s1-toolbox"}) session.attempt(correct(*session.scenario().find_step(id)));
    auto in = correct(*session.scenario().find_step("s2-torque-check"));
    in.torque_nm = 20.0;
    auto out = session.attempt(in);
    CHECK_FALSE(out.accepted);
    CHECK(out.error == ErrorKind::WrongTorque);

    // The wrench's own setting is used when no torque is given.
    in.torque_nm.reset();
    CHECK(session.attempt(in).accepted);
}

TEST_CASE("attempt: other rejection kinds") {
    auto session = fresh();
    for (const char* id : {"s1-gear", "s1-toolbox"}) session.attempt(correct(*session.scenario().find_step(id)));
    auto in = correct(*session.scenario().find_step("s2-torque-check"));

    auto wrong_part = in;
    wrong_part.part = "p-toolbox";
    CHECK(session.attempt(wrong_part).error == ErrorKind::UnknownTarget);

    auto no_tool = in;
    no_tool.tool.reset();
    CHECK(session.attempt(no_tool).error == ErrorKind::WrongTool);

    auto wrong_action = in;
    wrong_action.action = BasicAction::press();
    CHECK(session.attempt(wrong_action).error == ErrorKind::WrongAction);

    CHECK(session.state().error_log.size() == 3);
    CHECK(session.attempt(in).accepted);  // retries are allowed
}

TEST_CASE("attempt: unknown step and finished session") {
    auto session = fresh();
    AttemptInput bogus;
    bogus.step_id = "nope";
    CHECK_THROWS_AS(session.attempt(bogus), SessionError);
    session.abandon(10);
    try {
        session.attempt(correct(session.scenario().steps[0]));
        FAIL("expected session-finished");
    } catch (const SessionError& e) {
        CHECK(e.kind() == SessionError::Kind::SessionFinished);
    }
}

TEST_CASE("progress") {
    auto session = fresh();
    CHECK(session.progress().fraction == 0.0);
    for (const char* id : {"s1-gear", "s1-toolbox", "s2-torque-check"}) {
        REQUIRE(session.attempt(correct(*session.scenario().find_step(id))).accepted);
    }
    CHECK(session.progress().fraction == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(session.progress().per_stage.front() == std::pair<std::string, double>{"S1", 1.0});
}

TEST_CASE("score: perfect run is 100") {
    auto session = fresh(Mode::Examination);
    CHECK_THROWS_AS((void)session.finish_and_score(), SessionError);
    perfect_run(session);
    auto r = session.finish_and_score();
    CHECK(r.score == 100.0);
    CHECK(r.band == "81-100");
    for (const auto& [stage, ok] : r.stage_correctness()) CHECK(ok);
    CHECK(session.progress().fraction == 1.0);
}

TEST_CASE("score: immediate abandon is 0") {
    auto session = fresh();
    session.abandon(0);
    auto r = session.finish_and_score();
    CHECK(r.score == 0.0);
    CHECK(r.abandoned);
}

TEST_CASE("score: one wrong-tool error on an S3 step gives 95 and S3 incorrect") {
    auto session = fresh(Mode::Examination);
    std::int64_t t = 0;
    for (const auto& id : topological_order(session.scenario())) {
        auto in = correct(*session.scenario().find_step(id));
        in.t_ms = t += 500;
        if (id == "s3-cover-bolts") {
            auto wrong = in;
            wrong.tool = "t-socket-13";
            CHECK(session.attempt(wrong).error == ErrorKind::WrongTool);
        }
        REQUIRE(session.attempt(in).accepted);
    }
    auto r = session.finish_and_score();
    CHECK(r.score == doctest::Approx(95.0).epsilon(1e-12));
    for (const auto& [stage, ok] : r.stage_correctness()) CHECK(ok == (stage != "S3"));
}

TEST_CASE("score: floor at zero and custom rules") {
    auto session = fresh();
    AttemptInput wrong = correct(*session.scenario().find_step("s7-shelve"));
    for (int i = 0; i < 30; ++i) session.attempt(wrong);
    session.abandon(1);
    CHECK(session.finish_and_score().score == 0.0);

    auto rules = session.rules();
    rules.floor_at_zero = false;
    CHECK(session.finish_and_score(rules).score == doctest::Approx(-150.0));
}

TEST_CASE("scoring rules json and digest") {
    auto rules = ScoringRules::defaults(*fixture());
    CHECK(rules.total_points() == doctest::Approx(100.0));
    CHECK(ScoringRules::from_json(rules.to_json()) == rules);
    auto other = rules;
    other.deduction_per_error[ErrorKind::WrongAction] = 4.0;
    CHECK(other.digest() != rules.digest());
    CHECK(rules.digest().size() == 16);
}

TEST_CASE("candidate soundness and score bounds along random runs") {
    auto s = fixture();
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto script = testsupport::random_script(*s, seed);
        auto session = start_session(s, Mode::Training, HintConfig::t2(), ScoringRules::defaults(*s), "c");
        double last_fraction = 0.0;
        for (const auto& a : script) {
            if (a.abandon) {
                session.abandon(a.input.t_ms);
                break;
            }
            auto out = session.attempt(a.input);
            CHECK(out.error == a.expected);  // independent oracle
            CHECK(out.accepted == !out.error.has_value());

            const auto& st = session.state();
            std::set<std::string> brute;
            for (const auto& step : s->steps) {
                if (st.completed.count(step.id)) continue;
                if (std::all_of(step.prerequisites.begin(), step.prerequisites.end(),
                                [&](const std::string& p) { return st.completed.count(p) > 0; })) {
                    brute.insert(step.id);
                }
            }
            CHECK(st.candidates == brute);
            for (const auto& c : st.candidates) CHECK_FALSE(st.completed.count(c));
            CHECK(session.progress().fraction >= last_fraction);
            last_fraction = session.progress().fraction;
        }
        auto r = session.finish_and_score();
        CHECK(r.score >= 0.0);
        CHECK(r.score <= 100.0);

        // Arithmetic oracle for the default rules.
        double expect = 100.0 * static_cast<double>(r.completed_steps) / 15.0;
        for (const auto& e : session.state().error_log) {
            expect -= e.kind == ErrorKind::WrongAction ? 3.0 : e.kind == ErrorKind::UnknownTarget ? 2.0 : 5.0;
        }
        CHECK(r.score == doctest::Approx(std::clamp(expect, 0.0, 100.0)).epsilon(1e-9));
    }
}

TEST_CASE("replay: perfect run and wrong-torque run equal the live reports") {
    auto s = fixture();
    auto session = fresh();
    perfect_run(session);
    auto live = session.finish_and_score();
    auto replayed = replay(s, Mode::Training, session.rules(), session.event_log(), "t-1");
    CHECK(replayed == live);
    CHECK(replayed.score == 100.0);

    auto second = fresh();
    for (const char* id : {"s1-gear", "s1-toolbox"}) second.attempt(correct(*s->find_step(id)));
    auto bad = correct(*s->find_step("s2-torque-check"));
    bad.torque_nm = 20.0;
    second.attempt(bad);
    second.abandon(99);
    auto live2 = second.finish_and_score();
    CHECK(replay(s, Mode::Training, second.rules(), second.event_log(), "t-1") == live2);
}

TEST_CASE("replay: corruption") {
    auto s = fixture();
    auto session = fresh();
    perfect_run(session);
    auto log = session.event_log();

    const auto expect_corrupt = [&](const std::vector<EventMessage>& l) {
        try {
            replay(s, Mode::Training, session.rules(), l, "t-1");
            FAIL("expected log corruption");
        } catch (const SessionError& e) {
            CHECK(e.kind() == SessionError::Kind::LogCorruption);
        }
    };

    SUBCASE("sequence gap 1,2,4") {
        std::vector<EventMessage> gap{log[0], log[1], log[3]};
        expect_corrupt(gap);
    }
    SUBCASE("unknown step") {
        auto l = log;
        for (auto& m : l) {
            if (m.type == EventType::ActionPerformed) {
                m.target = "s99";
                break;
            }
        }
        expect_corrupt(l);
    }
    SUBCASE("truncated") {
        auto l = log;
        l.resize(l.size() / 2);
        expect_corrupt(l);
    }
}

TEST_CASE("session record round trip and replay") {
    auto session = fresh();
    perfect_run(session);
    auto record = make_record(session, "stu-1", "VR");
    auto text = record.serialize();
    auto back = SessionRecord::parse(text);
    CHECK(back == record);
    CHECK(back.serialize() == text);
    CHECK(replay_record(fixture(), back) == record.report);

    auto doc = Json::parse(text);
    doc["header"]["rules"]["deductions"]["wrong-tool"] = 1.0;
    CHECK_THROWS_AS(SessionRecord::parse(doc.dump()), Error);
}

TEST_CASE("independent sessions do not share state") {
    auto a = fresh();
    auto b = fresh();
    a.attempt(correct(*a.scenario().find_step("s1-gear")));
    CHECK(a.state().completed.size() == 1);
    CHECK(b.state().completed.empty());
    CHECK(a.event_log().size() != b.event_log().size());
}

TEST_CASE("golden event log for a scripted T3 run") {
    auto s = fixture();
    auto session = start_session(s, Mode::Training, HintConfig::t3(), ScoringRules::defaults(*s), "golden");
    std::int64_t t = 0;
    for (const auto& id : topological_order(*s)) {
        auto in = correct(*s->find_step(id));
        in.t_ms = t += 1000;
        if (id == "s2-torque-check") {
            auto wrong = in;
            wrong.torque_nm = 20.0;
            session.attempt(wrong);
        }
        session.attempt(in);
    }
    const auto text = write_event_log(session.event_log());
    CHECK(text == testsupport::read_text(testsupport::source_path("tests/golden/verano-t3-run.ndjson")));
}

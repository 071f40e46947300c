#include <algorithm>
#include <random>

#include "doctest.h"
#include "trainer/error.hpp"
#include "trainer/event_bus.hpp"

using namespace trainer;

namespace {

EventMessage msg(EventType type, std::string target = "x") {
    EventMessage m;
    m.type = type;
    m.target = std::move(target);
    return m;
}

}  // namespace

TEST_CASE("publish with no subscribers delivers to nobody") {
    EventBus bus;
    CHECK(bus.publish(msg(EventType::StepStarted)) == 0);
    CHECK(bus.log().size() == 1);
    CHECK(bus.log()[0].sequence == 1);
}

TEST_CASE("delivery count follows the filters") {
    EventBus bus;
    int all = 0, completed = 0, hints = 0;
    bus.subscribe({}, [&](const EventMessage&) { ++all; });
    bus.subscribe({EventType::StepCompleted}, [&](const EventMessage&) { ++completed; });
    bus.subscribe({EventType::HintIssued}, [&](const EventMessage&) { ++hints; });
    CHECK(bus.publish(msg(EventType::StepCompleted)) == 2);
    CHECK(all == 1);
    CHECK(completed == 1);
    CHECK(hints == 0);
}

TEST_CASE("subscriptions get distinct ids and both fire") {
    EventBus bus;
    int calls = 0;
    auto a = bus.subscribe({EventType::StepFailed}, [&](const EventMessage&) { ++calls; });
    auto b = bus.subscribe({EventType::StepFailed}, [&](const EventMessage&) { ++calls; });
    CHECK(a != b);
    bus.publish(msg(EventType::StepFailed));
    CHECK(calls == 2);
    CHECK(bus.unsubscribe(a));
    CHECK_FALSE(bus.unsubscribe(a));
    bus.publish(msg(EventType::StepFailed));
    CHECK(calls == 3);
}

TEST_CASE("re-entrant publish is queued behind the current message") {
    EventBus bus;
    std::vector<std::string> seen_by_second;
    bus.subscribe({}, [&](const EventMessage& m) {
        if (m.target == "A") bus.publish(msg(EventType::HintIssued, "B"));
    });
    bus.subscribe({}, [&](const EventMessage& m) { seen_by_second.push_back(m.target); });
    bus.publish(msg(EventType::StepStarted, "A"));

    // The second subscriber still sees A before B even though B was published mid-delivery of A.
    CHECK(seen_by_second == std::vector<std::string>{"A", "B"});
    auto log = bus.drain_log();
    REQUIRE(log.size() == 2);
    CHECK(log[0].target == "A");
    CHECK(log[0].sequence == 1);
    CHECK(log[1].target == "B");
    CHECK(log[1].sequence == 2);
}

TEST_CASE("closed bus rejects publish and subscribe") {
    EventBus bus;
    bus.close();
    CHECK_THROWS_AS(bus.publish(msg(EventType::StepStarted)), BusClosedError);
    CHECK_THROWS_AS(bus.subscribe({}, [](const EventMessage&) {}), BusClosedError);
}

TEST_CASE("empty target is rejected") {
    EventBus bus;
    CHECK_THROWS_AS(bus.publish(msg(EventType::StepStarted, "")), Error);
    CHECK(bus.log().empty());
}

TEST_CASE("random publish storms keep order, gapless numbers and exact delivery counts") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        EventBus bus;
        const int subs = static_cast<int>(rng() % 5);
        std::vector<std::set<EventType>> filters;
        std::vector<std::vector<std::uint64_t>> seen(subs);
        for (int i = 0; i < subs; ++i) {
            std::set<EventType> f;
            for (int t = 0; t < 7; ++t) {
                if (rng() % 3 == 0) f.insert(static_cast<EventType>(t));
            }
            filters.push_back(f);
            bus.subscribe(f, [&seen, i, &bus](const EventMessage& m) {
                seen[i].push_back(m.sequence);
                // Subscriber 0 echoes StepCompleted as ProgressUpdated, exercising the queue.
                if (i == 0 && m.type == EventType::StepCompleted) {
                    EventMessage echo;
                    echo.type = EventType::ProgressUpdated;
                    echo.target = "echo";
                    bus.publish(echo);
                }
            });
        }
        const int n = static_cast<int>(rng() % 30);
        std::size_t expected_deliveries = 0, actual_deliveries = 0;
        for (int k = 0; k < n; ++k) {
            auto type = static_cast<EventType>(rng() % 7);
            actual_deliveries += bus.publish(msg(type));
        }
        const auto& log = bus.log();
        for (std::size_t i = 0; i < log.size(); ++i) {
            REQUIRE(log[i].sequence == i + 1);
            for (int s = 0; s < subs; ++s) {
                if (filters[s].empty() || filters[s].count(log[i].type)) ++expected_deliveries;
            }
        }
        std::size_t observed = 0;
        for (int s = 0; s < subs; ++s) {
            CHECK(std::is_sorted(seen[s].begin(), seen[s].end()));
            observed += seen[s].size();
        }
        CHECK(observed == expected_deliveries);
        // publish() returns matches at its own call; echoes are counted by their inner publish.
        CHECK(actual_deliveries <= expected_deliveries);
    }
}

TEST_CASE("event log lines have a fixed field order and round trip") {
    EventMessage m;
    m.type = EventType::ActionPerformed;
    m.target = "s2-torque-check";
    m.sequence = 7;
    m.timestamp_ms = 1200;
    m.payload = {{"action", std::string("press")}, {"torque_nm", 35.0}, {"ok", true}, {"n", std::int64_t{3}}};
    const auto line = event_to_json_line(m);
    CHECK(line ==
          R"({"seq":7,"t_ms":1200,"action":"ActionPerformed","target":"s2-torque-check","payload":{"action":"press","n":3,"ok":true,"torque_nm":35.0}})");
    CHECK(event_from_json_line(line) == m);

    std::vector<EventMessage> log{m, m};
    log[1].sequence = 8;
    CHECK(read_event_log(write_event_log(log)) == log);
}

#pragma once

// Control-layer message system. One bus per session; publishes are externally serialized.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trainer/canonical_json.hpp"

namespace trainer {

enum class EventType {
    StepStarted,
    ActionPerformed,
    StepCompleted,
    StepFailed,
    HintIssued,
    ProgressUpdated,
    SessionFinished,
};

const char* to_string(EventType type) noexcept;
std::optional<EventType> event_type_from_string(std::string_view name) noexcept;

using PayloadValue = std::variant<bool, std::int64_t, double, std::string>;
using Payload = std::map<std::string, PayloadValue>;

struct EventMessage {
    EventType type = EventType::StepStarted;
    std::string target;
    Payload payload;
    std::uint64_t sequence = 0;
    std::int64_t timestamp_ms = 0;

    friend bool operator==(const EventMessage&, const EventMessage&) = default;
};

/// Field order is fixed: seq, t_ms, action, target, payload.
std::string event_to_json_line(const EventMessage& message);
EventMessage event_from_json_line(std::string_view line);
nlohmann::ordered_json event_to_json(const EventMessage& message);
EventMessage event_from_json(const Json& j);

/// Newline-delimited event log.
std::string write_event_log(const std::vector<EventMessage>& log);
std::vector<EventMessage> read_event_log(std::string_view text);

class EventBus {
public:
    using Handler = std::function<void(const EventMessage&)>;
    using SubscriptionId = std::uint64_t;
    /// Empty filter matches every action type.
    using Filter = std::set<EventType>;

    EventBus() = default;
    EventBus(const EventBus&) = delete;
    EventBus& operator=(const EventBus&) = delete;

    SubscriptionId subscribe(Filter filter, Handler handler);
    bool unsubscribe(SubscriptionId id);

    /// Assigns the next sequence number and appends to the log. Called from inside a
    /// handler, the message is queued and delivered once the current delivery returns.
    /// Returns the number of subscriptions matching at publish time.
    std::size_t publish(EventMessage message);

    /// Every message published so far, in sequence order.
    [[nodiscard]] std::vector<EventMessage> drain_log() const { return log_; }
    [[nodiscard]] const std::vector<EventMessage>& log() const noexcept { return log_; }

    void close() noexcept { closed_ = true; }
    [[nodiscard]] bool closed() const noexcept { return closed_; }

private:
    struct Subscription {
        SubscriptionId id;
        Filter filter;
        Handler handler;
    };
    struct Pending {
        std::size_t log_index;
        std::vector<SubscriptionId> recipients;
    };

    void deliver(const Pending& pending);

    std::vector<Subscription> subscriptions_;
    std::vector<EventMessage> log_;
    std::deque<Pending> queue_;
    SubscriptionId next_id_ = 1;
    bool delivering_ = false;
    bool closed_ = false;
};

}  // namespace trainer

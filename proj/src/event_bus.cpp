#include "trainer/event_bus.hpp"

#include <algorithm>

#include "trainer/error.hpp"

namespace trainer {

namespace {

constexpr std::pair<EventType, const char*> kNames[] = {
    {EventType::StepStarted, "StepStarted"},         {EventType::ActionPerformed, "ActionPerformed"},
    {EventType::StepCompleted, "StepCompleted"},     {EventType::StepFailed, "StepFailed"},
    {EventType::HintIssued, "HintIssued"},           {EventType::ProgressUpdated, "ProgressUpdated"},
    {EventType::SessionFinished, "SessionFinished"},
};

}  // namespace

const char* to_string(EventType type) noexcept {
    for (const auto& [t, name] : kNames) {
        if (t == type) return name;
    }
    return "?";
}

std::optional<EventType> event_type_from_string(std::string_view name) noexcept {
    for (const auto& [t, n] : kNames) {
        if (name == n) return t;
    }
    return std::nullopt;
}

nlohmann::ordered_json event_to_json(const EventMessage& m) {
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
    for (const auto& [key, value] : m.payload) {
        std::visit([&](const auto& v) { payload[key] = v; }, value);
    }
    nlohmann::ordered_json j;
    j["seq"] = m.sequence;
    j["t_ms"] = m.timestamp_ms;
    j["action"] = to_string(m.type);
    j["target"] = m.target;
    j["payload"] = std::move(payload);
    return j;
}

std::string event_to_json_line(const EventMessage& message) { return event_to_json(message).dump(); }

EventMessage event_from_json(const Json& j) {
    if (!j.is_object()) throw Error("event record is not an object");
    EventMessage m;
    const auto& seq = j.at("seq");
    if (!seq.is_number_unsigned() && !(seq.is_number_integer() && seq.get<std::int64_t>() >= 0)) {
        throw Error("event seq must be a non-negative integer");
    }
    m.sequence = seq.get<std::uint64_t>();
    if (!j.at("t_ms").is_number_integer()) throw Error("event t_ms must be an integer");
    m.timestamp_ms = j.at("t_ms").get<std::int64_t>();
    auto type = event_type_from_string(j.at("action").get<std::string>());
    if (!type) throw Error("unknown event action '" + j.at("action").get<std::string>() + "'");
    m.type = *type;
    m.target = j.at("target").get<std::string>();
    for (const auto& item : j.at("payload").items()) {
        const auto& v = item.value();
        if (v.is_boolean()) {
            m.payload[item.key()] = v.get<bool>();
        } else if (v.is_number_integer()) {
            m.payload[item.key()] = v.get<std::int64_t>();
        } else if (v.is_number_float()) {
            m.payload[item.key()] = v.get<double>();
        } else if (v.is_string()) {
            m.payload[item.key()] = v.get<std::string>();
        } else {
            throw Error("payload value for '" + item.key() + "' is not a scalar");
        }
    }
    return m;
}

EventMessage event_from_json_line(std::string_view line) {
    try {
        return event_from_json(Json::parse(line.begin(), line.end()));
    } catch (const Json::exception& e) {
        throw Error(std::string("malformed event record: ") + e.what());
    }
}

std::string write_event_log(const std::vector<EventMessage>& log) {
    std::string out;
    for (const auto& m : log) {
        out += event_to_json_line(m);
        out += '\n';
    }
    return out;
}

std::vector<EventMessage> read_event_log(std::string_view text) {
    std::vector<EventMessage> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty()) out.push_back(event_from_json_line(line));
        start = end + 1;
    }
    return out;
}

EventBus::SubscriptionId EventBus::subscribe(Filter filter, Handler handler) {
    if (closed_) throw BusClosedError();
    const auto id = next_id_++;
    subscriptions_.push_back({id, std::move(filter), std::move(handler)});
    return id;
}

bool EventBus::unsubscribe(SubscriptionId id) {
    auto it = std::find_if(subscriptions_.begin(), subscriptions_.end(),
                           [&](const Subscription& s) { return s.id == id; });
    if (it == subscriptions_.end()) return false;
    subscriptions_.erase(it);
    return true;
}

std::size_t EventBus::publish(EventMessage message) {
    if (closed_) throw BusClosedError();
    if (message.target.empty()) throw Error("event target must be non-empty");

    message.sequence = log_.size() + 1;
    Pending pending{log_.size(), {}};
    for (const auto& s : subscriptions_) {
        if (s.filter.empty() || s.filter.count(message.type)) pending.recipients.push_back(s.id);
    }
    log_.push_back(std::move(message));
    const auto count = pending.recipients.size();
    queue_.push_back(std::move(pending));

    if (delivering_) return count;

    delivering_ = true;
    struct Guard {
        bool& flag;
        ~Guard() { flag = false; }
    } guard{delivering_};
    while (!queue_.empty()) {
        Pending next = std::move(queue_.front());
        queue_.pop_front();
        deliver(next);
    }
    return count;
}

void EventBus::deliver(const Pending& pending) {
    // Copy: re-entrant publishes append to log_ while handlers run.
    const EventMessage message = log_[pending.log_index];
    for (auto id : pending.recipients) {
        // Re-lookup: a handler may have unsubscribed a later recipient.
        auto it = std::find_if(subscriptions_.begin(), subscriptions_.end(),
                               [&](const Subscription& s) { return s.id == id; });
        if (it == subscriptions_.end()) continue;
        auto handler = it->handler;
        handler(message);
    }
}

}  // namespace trainer

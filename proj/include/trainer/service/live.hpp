#pragma once

// Live sessions driven over HTTP by the interaction layer.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "trainer/error.hpp"
#include "trainer/service/store.hpp"
#include "trainer/session.hpp"

namespace trainer::service {

struct LiveSessionInfo {
    std::string student_id;
    std::string group;
    std::optional<std::string> stored_id;  // set once the finished record is ingested
};

class LiveSessions {
public:
    explicit LiveSessions(SessionStore& store);

    /// Returns the new session id. Throws Error on an unknown scenario.
    std::string create(const std::string& scenario_id, Mode mode, HintConfig hints, std::string student_id,
                       std::string group, std::optional<std::string> session_id = std::nullopt);

    /// Body: {step, action, part?, tool?, torque_nm?, t_ms?}. Returns {accepted, error, events, state}.
    Json attempt(const std::string& session_id, const Json& body);
    Json abandon(const std::string& session_id, std::int64_t t_ms);
    [[nodiscard]] Json state(const std::string& session_id) const;
    [[nodiscard]] std::string event_log(const std::string& session_id) const;
    [[nodiscard]] bool contains(const std::string& session_id) const;

private:
    struct Entry {
        Entry(Session s, LiveSessionInfo i) : session(std::move(s)), info(std::move(i)) {}

        mutable std::mutex mutex;
        Session session;
        LiveSessionInfo info;
    };

    std::shared_ptr<Entry> find(const std::string& session_id) const;
    Json state_locked(const Entry& entry) const;
    void store_if_finished(Entry& entry);

    SessionStore& store_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t counter_ = 0;
};

/// Thrown for ids that name no live session (HTTP 404).
class LiveSessionNotFound : public Error {
public:
    using Error::Error;
};

}  // namespace trainer::service

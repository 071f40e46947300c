#pragma once

// Append-only directory of replay-verified session records.
//
//   <data>/records/<session-id>.json   one canonical envelope per session
//   <data>/index.jsonl                 one line per record, rebuilt on open if stale
//
// Records become visible by atomic rename after fsync, so a crash at any point leaves
// either the complete record or none of it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "trainer/analytics.hpp"
#include "trainer/service/catalog.hpp"
#include "trainer/session.hpp"

namespace trainer::service {

struct StoreConfig {
    std::filesystem::path data_dir = "trainer-data";
    int listen_port = 8080;
    std::optional<std::string> auth_token;
    std::optional<std::filesystem::path> static_dir;

    /// Throws Error on an out-of-range port.
    void validate() const;
    /// TRAINER_DATA, when set, replaces data_dir.
    void apply_environment();
};

struct StoredSession {
    std::string session_id;
    std::string scenario_id;
    std::string student_id;
    std::string group;
    Mode mode = Mode::Training;
    std::int64_t created_at_ms = 0;  // wall clock, ms since the Unix epoch
    SessionRecord record;
    ScoreReport report;

    [[nodiscard]] Json to_json() const;
    static StoredSession from_json(const Json& j);
};

/// Session ids double as file names: [A-Za-z0-9._-], 1..128 chars, not starting with '.'.
bool valid_session_id(std::string_view id) noexcept;

class SessionStore {
public:
    using Clock = std::function<std::int64_t()>;

    /// Creates the directory layout, drops partial writes, rebuilds a stale index.
    SessionStore(std::filesystem::path data_dir, std::shared_ptr<const ScenarioCatalog> catalog,
                 Clock clock = nullptr);

    /// Parse, replay, compare, then persist durably. Throws StoreError.
    StoredSession ingest(std::string_view record_document);
    StoredSession ingest(const SessionRecord& record);

    [[nodiscard]] std::optional<StoredSession> get(const std::string& session_id) const;
    /// Ordered by (created_at, session_id). Empty filters match everything.
    [[nodiscard]] std::vector<StoredSession> sessions(const std::string& group, const std::string& scenario_id) const;
    [[nodiscard]] analytics::CohortRecord query_cohort(const std::string& group, const std::string& scenario_id) const;
    [[nodiscard]] std::size_t size() const;

    /// Replays every stored record; returns the ids whose replay disagrees.
    [[nodiscard]] std::vector<std::string> verify_all() const;

    [[nodiscard]] const std::filesystem::path& data_dir() const noexcept { return dir_; }
    [[nodiscard]] const ScenarioCatalog& catalog() const noexcept { return *catalog_; }

private:
    void recover();
    void write_index_locked();

    std::filesystem::path dir_;
    std::shared_ptr<const ScenarioCatalog> catalog_;
    Clock clock_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, StoredSession> sessions_;
};

}  // namespace trainer::service

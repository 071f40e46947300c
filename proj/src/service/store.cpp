#include "trainer/service/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "trainer/error.hpp"

namespace trainer::service {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void storage_failure(const std::string& what) {
    throw StoreError(StoreError::Kind::Storage, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const std::string& path) {
    while (!bytes.empty()) {
        auto n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            storage_failure("write " + path);
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

void fsync_path(const fs::path& path, int flags) {
    int fd = ::open(path.c_str(), flags);
    if (fd < 0) storage_failure("open " + path.string());
    if (::fsync(fd) != 0) {
        ::close(fd);
        storage_failure("fsync " + path.string());
    }
    ::close(fd);
}

/// tmp file + fsync + rename + directory fsync.
void write_durably(const fs::path& target, std::string_view bytes) {
    const fs::path tmp = target.string() + ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) storage_failure("open " + tmp.string());
    try {
        write_all(fd, bytes, tmp.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    if (::fsync(fd) != 0) {
        ::close(fd);
        storage_failure("fsync " + tmp.string());
    }
    ::close(fd);
    if (::rename(tmp.c_str(), target.c_str()) != 0) storage_failure("rename " + tmp.string());
    fsync_path(target.parent_path(), O_RDONLY | O_DIRECTORY);
}

void append_durably(const fs::path& target, std::string_view bytes) {
    int fd = ::open(target.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) storage_failure("open " + target.string());
    try {
        write_all(fd, bytes, target.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    if (::fsync(fd) != 0) {
        ::close(fd);
        storage_failure("fsync " + target.string());
    }
    ::close(fd);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::int64_t wall_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Json index_line(const StoredSession& s) {
    return Json{{"session_id", s.session_id}, {"scenario_id", s.scenario_id}, {"group", s.group},
                {"student_id", s.student_id}, {"created_at_ms", s.created_at_ms}};
}

}  // namespace

void StoreConfig::validate() const {
    if (listen_port < 0 || listen_port > 65535) {
        throw Error("listen port " + std::to_string(listen_port) + " is outside 0-65535");
    }
}

void StoreConfig::apply_environment() {
    if (const char* dir = std::getenv("TRAINER_DATA"); dir && *dir) data_dir = dir;
}

bool valid_session_id(std::string_view id) noexcept {
    if (id.empty() || id.size() > 128 || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
               c == '-';
    });
}

Json StoredSession::to_json() const {
    return Json{{"session_id", session_id}, {"scenario_id", scenario_id}, {"student_id", student_id},
                {"group", group},           {"mode", to_string(mode)},    {"created_at_ms", created_at_ms},
                {"record", record.to_json()}, {"score_report", report.to_json()}};
}

StoredSession StoredSession::from_json(const Json& j) {
    StoredSession s;
    s.session_id = j.at("session_id").get<std::string>();
    s.scenario_id = j.at("scenario_id").get<std::string>();
    s.student_id = j.at("student_id").get<std::string>();
    s.group = j.at("group").get<std::string>();
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    s.record = SessionRecord::from_json(j.at("record"));
    s.report = ScoreReport::from_json(j.at("score_report"));
    return s;
}

SessionStore::SessionStore(fs::path data_dir, std::shared_ptr<const ScenarioCatalog> catalog, Clock clock)
    : dir_(std::move(data_dir)), catalog_(std::move(catalog)), clock_(clock ? std::move(clock) : wall_clock_ms) {
    if (!catalog_) throw Error("session store needs a scenario catalog");
    std::error_code ec;
    fs::create_directories(dir_ / "records", ec);
    if (ec) throw StoreError(StoreError::Kind::Storage, "cannot create " + (dir_ / "records").string() + ": " + ec.message());
    recover();
}

void SessionStore::recover() {
    std::unique_lock lock(mutex_);
    sessions_.clear();
    for (const auto& entry : fs::directory_iterator(dir_ / "records")) {
        const auto& path = entry.path();
        if (path.extension() == ".tmp") {
            // Interrupted before rename: never acknowledged.
            fs::remove(path);
            continue;
        }
        if (path.extension() != ".json") continue;
        try {
            auto stored = StoredSession::from_json(Json::parse(read_file(path)));
            if (stored.session_id != path.stem().string()) throw Error("file name does not match session id");
            sessions_.emplace(stored.session_id, std::move(stored));
        } catch (const std::exception& e) {
            throw StoreError(StoreError::Kind::Storage, "unreadable record " + path.string() + ": " + e.what());
        }
    }

    // The index is derived data; rewrite it whenever it disagrees with the records.
    std::set<std::string> indexed;
    bool stale = false;
    std::ifstream in(dir_ / "index.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        try {
            auto id = Json::parse(line).at("session_id").get<std::string>();
            if (!sessions_.count(id) || !indexed.insert(id).second) stale = true;
        } catch (const std::exception&) {
            stale = true;  // torn trailing line
        }
    }
    if (indexed.size() != sessions_.size()) stale = true;
    if (stale || !fs::exists(dir_ / "index.jsonl")) write_index_locked();
}

void SessionStore::write_index_locked() {
    std::vector<const StoredSession*> ordered;
    for (const auto& [id, s] : sessions_) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](const StoredSession* a, const StoredSession* b) {
        return std::tie(a->created_at_ms, a->session_id) < std::tie(b->created_at_ms, b->session_id);
    });
    std::string text;
    for (const auto* s : ordered) text += index_line(*s).dump() + "\n";
    write_durably(dir_ / "index.jsonl", text);
}

StoredSession SessionStore::ingest(std::string_view record_document) {
    SessionRecord record;
    try {
        record = SessionRecord::parse(record_document);
    } catch (const Error& e) {
        throw StoreError(StoreError::Kind::Parse, e.what());
    }
    return ingest(record);
}

StoredSession SessionStore::ingest(const SessionRecord& record) {
    if (!valid_session_id(record.session_id)) {
        throw StoreError(StoreError::Kind::Parse, "invalid session id '" + record.session_id + "'");
    }
    auto scenario = catalog_->find(record.scenario_id);
    if (!scenario) throw StoreError(StoreError::Kind::UnknownScenario, "unknown scenario '" + record.scenario_id + "'");

    ScoreReport replayed;
    try {
        replayed = replay_record(scenario, record);
    } catch (const SessionError& e) {
        throw StoreError(StoreError::Kind::ReplayMismatch, std::string("replay failed: ") + e.what());
    }
    if (to_canonical(replayed.to_json()) != to_canonical(record.report.to_json())) {
        throw StoreError(StoreError::Kind::ReplayMismatch,
                         "embedded report does not match replay (embedded score " + std::to_string(record.report.score) +
                             ", replayed " + std::to_string(replayed.score) + ")");
    }

    std::unique_lock lock(mutex_);
    const fs::path target = dir_ / "records" / (record.session_id + ".json");
    if (sessions_.count(record.session_id) || fs::exists(target)) {
        throw StoreError(StoreError::Kind::DuplicateId, "session '" + record.session_id + "' already stored");
    }

    StoredSession stored;
    stored.session_id = record.session_id;
    stored.scenario_id = record.scenario_id;
    stored.student_id = record.student_id;
    stored.group = record.group;
    stored.mode = record.mode;
    stored.created_at_ms = clock_();
    stored.record = record;
    stored.report = replayed;

    write_durably(target, to_canonical(stored.to_json()));
    append_durably(dir_ / "index.jsonl", index_line(stored).dump() + "\n");
    sessions_.emplace(stored.session_id, stored);
    return stored;
}

std::optional<StoredSession> SessionStore::get(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

std::vector<StoredSession> SessionStore::sessions(const std::string& group, const std::string& scenario_id) const {
    std::shared_lock lock(mutex_);
    std::vector<StoredSession> out;
    for (const auto& [id, s] : sessions_) {
        if ((group.empty() || s.group == group) && (scenario_id.empty() || s.scenario_id == scenario_id)) {
            out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end(), [](const StoredSession& a, const StoredSession& b) {
        return std::tie(a.created_at_ms, a.session_id) < std::tie(b.created_at_ms, b.session_id);
    });
    return out;
}

analytics::CohortRecord SessionStore::query_cohort(const std::string& group, const std::string& scenario_id) const {
    analytics::CohortRecord cohort;
    cohort.group = group;
    for (const auto& s : sessions(group, scenario_id)) {
        auto student = analytics::student_from_report(s.student_id.empty() ? s.session_id : s.student_id, s.report);
        cohort.students.push_back(std::move(student));
    }
    return cohort;
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

std::vector<std::string> SessionStore::verify_all() const {
    std::vector<std::string> bad;
    for (const auto& s : sessions("", "")) {
        try {
            auto scenario = catalog_->find(s.scenario_id);
            auto replayed = replay_record(scenario, s.record);
            if (to_canonical(replayed.to_json()) != to_canonical(s.report.to_json())) bad.push_back(s.session_id);
        } catch (const Error&) {
            bad.push_back(s.session_id);
        }
    }
    return bad;
}

}  // namespace trainer::service

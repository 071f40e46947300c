#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "support.hpp"
#include "trainer/service/catalog.hpp"
#include "trainer/session.hpp"

namespace servicesupport {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("trainer-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::shared_ptr<const trainer::service::ScenarioCatalog> catalog() {
    static const auto c =
        std::make_shared<const trainer::service::ScenarioCatalog>(trainer::service::ScenarioCatalog::builtin());
    return c;
}

// seed 0: perfect run. seed -1: one wrong torque before the first torque step (score 95).
// Anything else: a random trainee script in training mode.
inline trainer::SessionRecord make_record(const std::string& id, long long seed, const std::string& group,
                                          trainer::Mode mode = trainer::Mode::Training) {
    auto s = catalog()->find("verano-s1-s7");
    auto session = trainer::start_session(s, mode, trainer::HintConfig::t3(), trainer::ScoringRules::defaults(*s), id);
    if (seed <= 0) {
        std::mt19937_64 rng(7);
        std::int64_t t = 0;
        bool slipped = seed == 0;
        for (const auto& step_id : trainer::topological_order(*s)) {
            const auto& step = *s->find_step(step_id);
            auto in = testsupport::correct_attempt(*s, step, rng);
            if (!slipped && step.required_torque_nm) {
                auto wrong = in;
                wrong.torque_nm = *step.required_torque_nm - 15.0;
                wrong.t_ms = t += 1000;
                session.attempt(wrong);
                slipped = true;
            }
            in.t_ms = t += 1000;
            session.attempt(in);
        }
    } else {
        for (const auto& a : testsupport::random_script(*s, static_cast<std::uint64_t>(seed))) {
            if (a.abandon) {
                session.abandon(a.input.t_ms);
                break;
            }
            session.attempt(a.input);
        }
    }
    return trainer::make_record(session, "student-" + id, group);
}

}  // namespace servicesupport

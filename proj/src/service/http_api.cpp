#include "trainer/service/http_api.hpp"

#include <functional>

#include "httplib.h"
#include "trainer/error.hpp"

namespace trainer::service {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, Json{{"error", code}, {"message", message}});
}

int store_status(StoreError::Kind kind) {
    switch (kind) {
        case StoreError::Kind::Parse: return 400;
        case StoreError::Kind::DuplicateId: return 409;
        case StoreError::Kind::ReplayMismatch:
        case StoreError::Kind::UnknownScenario: return 422;
        case StoreError::Kind::Storage: return 500;
    }
    return 500;
}

const char* store_code(StoreError::Kind kind) {
    switch (kind) {
        case StoreError::Kind::Parse: return "parse";
        case StoreError::Kind::DuplicateId: return "duplicate";
        case StoreError::Kind::ReplayMismatch: return "replay_mismatch";
        case StoreError::Kind::UnknownScenario: return "unknown_scenario";
        case StoreError::Kind::Storage: return "storage";
    }
    return "storage";
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

/// Maps library exceptions onto HTTP statuses.
Handler guarded(Handler inner) {
    return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
        try {
            inner(req, res);
        } catch (const LiveSessionNotFound& e) {
            send_error(res, 404, "not_found", e.what());
        } catch (const StoreError& e) {
            send_error(res, store_status(e.kind()), store_code(e.kind()), e.what());
        } catch (const SessionError& e) {
            const bool finished = e.kind() == SessionError::Kind::SessionFinished;
            send_error(res, finished ? 409 : 400, finished ? "finished" : "session", e.what());
        } catch (const Error& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const Json::exception& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        auto j = Json::parse(req.body);
        if (!j.is_object()) throw Error("request body must be a JSON object");
        return j;
    } catch (const Json::parse_error& e) {
        throw Error(std::string("request body: ") + e.what());
    }
}

Json scenario_summary(const Scenario& s) {
    Json stages = Json::array();
    for (const auto& st : s.stages) stages.push_back({{"id", st.id}, {"title", st.title}});
    return Json{{"id", s.id},
                {"engine_name", s.engine_name},
                {"direction", to_string(s.direction)},
                {"steps", s.steps.size()},
                {"stages", std::move(stages)}};
}

}  // namespace

Server::Server(SessionStore& store, StoreConfig config)
    : store_(store), config_(std::move(config)), live_(store), http_(std::make_unique<httplib::Server>()) {
    config_.validate();
    routes();
}

Server::~Server() { stop(); }

void Server::routes() {
    auto& svr = *http_;

    // Wraps endpoints that need the bearer token when one is configured.
    auto protect = [this](Handler inner) -> Handler {
        return [this, inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
            if (config_.auth_token) {
                auto header = req.get_header_value("Authorization");
                if (header != "Bearer " + *config_.auth_token) {
                    send_error(res, 401, "unauthorized", "missing or invalid bearer token");
                    return;
                }
            }
            inner(req, res);
        };
    };

    svr.Get("/v1/health", guarded([this](const httplib::Request&, httplib::Response& res) {
                send_json(res, 200, Json{{"status", "ok"}, {"stored_sessions", store_.size()}});
            }));

    svr.Get("/v1/scenarios", guarded([this](const httplib::Request&, httplib::Response& res) {
                Json out = Json::array();
                for (const auto& s : store_.catalog().list()) out.push_back(scenario_summary(*s));
                send_json(res, 200, out);
            }));

    svr.Get("/v1/scenarios/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = store_.catalog().find(req.path_params.at("id"));
                if (!s) return send_error(res, 404, "not_found", "unknown scenario");
                send_json(res, 200, scenario_to_json(*s));
            }));

    svr.Post("/v1/sessions", guarded(protect([this](const httplib::Request& req, httplib::Response& res) {
                 auto stored = store_.ingest(req.body);
                 send_json(res, 201,
                           Json{{"session_id", stored.session_id},
                                {"created_at_ms", stored.created_at_ms},
                                {"score_report", stored.report.to_json()}});
             })));

    svr.Get("/v1/sessions/:id", guarded(protect([this](const httplib::Request& req, httplib::Response& res) {
                auto stored = store_.get(req.path_params.at("id"));
                if (!stored) return send_error(res, 404, "not_found", "unknown session");
                send_json(res, 200, stored->to_json());
            })));

    svr.Get("/v1/cohorts/:group/report",
            guarded(protect([this](const httplib::Request& req, httplib::Response& res) {
                auto cohort = store_.query_cohort(req.path_params.at("group"), req.get_param_value("scenario"));
                if (cohort.students.empty()) return send_error(res, 404, "not_found", "no sessions for this cohort");
                send_json(res, 200, analytics::report_to_json({analytics::build_report(cohort)}));
            })));

    svr.Post("/v1/live", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 auto mode = mode_from_string(body.value("mode", std::string("training")));
                 auto hints = HintConfig::preset(body.value("hints", std::string("T3")));
                 std::optional<std::string> id;
                 if (body.contains("session_id")) id = body.at("session_id").get<std::string>();
                 auto session_id = live_.create(body.at("scenario").get<std::string>(), mode, hints,
                                                body.value("student_id", std::string()),
                                                body.value("group", std::string()), id);
                 send_json(res, 201, Json{{"session_id", session_id}, {"state", live_.state(session_id)}});
             }));

    svr.Post("/v1/live/:id/attempt", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, live_.attempt(req.path_params.at("id"), parse_body(req)));
             }));

    svr.Post("/v1/live/:id/abandon", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 send_json(res, 200, live_.abandon(req.path_params.at("id"), body.value("t_ms", std::int64_t{0})));
             }));

    svr.Get("/v1/live/:id/state", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, live_.state(req.path_params.at("id")));
            }));

    svr.Get("/v1/live/:id/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
                res.set_content(live_.event_log(req.path_params.at("id")), "application/x-ndjson");
            }));

    if (config_.static_dir && !svr.set_mount_point("/", config_.static_dir->string())) {
        throw Error("static directory " + config_.static_dir->string() + " does not exist");
    }
}

void Server::bind() {
    if (config_.listen_port == 0) {
        port_ = http_->bind_to_any_port("0.0.0.0");
    } else {
        port_ = http_->bind_to_port("0.0.0.0", config_.listen_port) ? config_.listen_port : -1;
    }
    if (port_ <= 0) throw Error("cannot bind port " + std::to_string(config_.listen_port));
}

void Server::start() {
    bind();
    worker_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void Server::run() {
    bind();
    http_->listen_after_bind();
}

void Server::stop() {
    if (http_) http_->stop();
    if (worker_.joinable()) worker_.join();
}

}  // namespace trainer::service

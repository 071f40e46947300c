// trainer: command-line front end for scenarios, sessions, cohort reports, perf traces and the service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "trainer/analytics.hpp"
#include "trainer/error.hpp"
#include "trainer/perf/batching.hpp"
#include "trainer/perf/compare.hpp"
#include "trainer/perf/kernels.hpp"
#include "trainer/service/http_api.hpp"

using namespace trainer;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

/// A path, or the id of a built-in fixture.
std::shared_ptr<const Scenario> load_scenario(const std::string& ref) {
    if (std::filesystem::exists(ref)) return std::make_shared<const Scenario>(parse_scenario(read_file(ref)));
    auto builtin = service::ScenarioCatalog::builtin().find(ref);
    if (!builtin) throw Error("no scenario file or built-in scenario named '" + ref + "'");
    return builtin;
}

int cmd_validate(const std::string& file, bool canonical) {
    try {
        auto scenario = parse_scenario(read_file(file));
        for (const auto& d : validate_scenario(scenario)) {
            std::cerr << "warning: " << d.location << ": " << d.message << "\n";
        }
        if (canonical) {
            std::cout << serialize_scenario(scenario);
        } else {
            std::cout << "ok " << scenario.id << ": " << scenario.steps.size() << " steps, " << scenario.stages.size()
                      << " stages\n";
        }
        return 0;
    } catch (const ScenarioError& e) {
        std::cerr << to_string(e.kind()) << " error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_invert(const std::string& file) {
    std::cout << serialize_scenario(invert_scenario(parse_scenario(read_file(file))));
    return 0;
}

// One attempt per line:  <step> <action> [part=ID] [tool=ID] [torque=NM] [t=MS]
// "abandon [t=MS]" ends the session early.
int cmd_run(const std::string& ref, const std::string& mode_name, const std::string& hints_name,
            const std::string& session_id, const std::string& student, const std::string& group,
            const std::string& record_out) {
    auto scenario = load_scenario(ref);
    auto mode = mode_from_string(mode_name);
    auto rules = ScoringRules::defaults(*scenario);
    auto session = start_session(scenario, mode, HintConfig::preset(hints_name), rules, session_id);
    for (const auto& e : session.event_log()) std::cout << event_to_json_line(e) << "\n";

    std::string line;
    while (!session.state().finished && std::getline(std::cin, line)) {
        std::istringstream words(line);
        std::string head;
        if (!(words >> head) || head[0] == '#') continue;
        AttemptInput input;
        input.t_ms = session.state().clock_ms;
        bool abandon = head == "abandon";
        if (!abandon) {
            input.step_id = head;
            std::string action;
            if (!(words >> action)) {
                std::cerr << "expected: <step> <action> [part=] [tool=] [torque=] [t=]\n";
                continue;
            }
            try {
                input.action = action_from_string(action);
            } catch (const Error& e) {
                std::cerr << e.what() << "\n";
                continue;
            }
        }
        for (std::string kv; words >> kv;) {
            auto eq = kv.find('=');
            auto key = kv.substr(0, eq);
            auto value = eq == std::string::npos ? std::string() : kv.substr(eq + 1);
            if (key == "part") input.part = value;
            else if (key == "tool") input.tool = value;
            else if (key == "torque") input.torque_nm = std::stod(value);
            else if (key == "t") input.t_ms = std::max<std::int64_t>(std::stoll(value), session.state().clock_ms);
            else std::cerr << "ignoring '" << kv << "'\n";
        }
        std::size_t before = session.event_log().size();
        try {
            if (abandon) session.abandon(input.t_ms);
            else session.attempt(input);
        } catch (const SessionError& e) {
            std::cerr << e.what() << "\n";
            continue;
        }
        const auto& log = session.event_log();
        for (std::size_t i = before; i < log.size(); ++i) std::cout << event_to_json_line(log[i]) << "\n";
    }
    if (!session.state().finished) session.abandon(session.state().clock_ms);

    auto record = make_record(session, student, group);
    std::cerr << "score " << record.report.score << " (" << record.report.band << ")\n";
    if (!record_out.empty()) write_file(record_out, record.serialize());
    return 0;
}

int cmd_replay(const std::string& file, const std::string& scenario_ref) {
    auto record = SessionRecord::parse(read_file(file));
    auto scenario = load_scenario(scenario_ref.empty() ? record.scenario_id : scenario_ref);
    auto replayed = replay_record(scenario, record);
    std::cout << to_canonical(replayed.to_json());
    if (to_canonical(replayed.to_json()) != to_canonical(record.report.to_json())) {
        std::cerr << "mismatch: embedded score " << record.report.score << ", replayed " << replayed.score << "\n";
        return 2;
    }
    std::cerr << "replay matches the embedded report\n";
    return 0;
}

int cmd_report(const std::string& csv, const std::string& store_dir, const std::string& group,
               const std::string& scenario_id, bool json) {
    std::vector<analytics::CohortReport> reports;
    if (!csv.empty()) {
        for (const auto& cohort : analytics::read_cohort_csv(read_file(csv))) {
            if (group.empty() || cohort.group == group) reports.push_back(analytics::build_report(cohort));
        }
    } else if (!store_dir.empty()) {
        auto catalog = std::make_shared<service::ScenarioCatalog>(service::ScenarioCatalog::builtin());
        service::SessionStore store(store_dir, catalog);
        std::set<std::string> groups;
        for (const auto& s : store.sessions(group, scenario_id)) groups.insert(s.group);
        for (const auto& g : groups) reports.push_back(analytics::build_report(store.query_cohort(g, scenario_id)));
    } else {
        throw Error("report needs --cohort or --store");
    }
    if (json) std::cout << to_canonical(analytics::report_to_json(reports));
    else std::cout << analytics::report_to_text(reports);
    return 0;
}

struct PerfOptions {
    std::string scene;
    std::string trace;
    std::string vsync = "every";
    double refresh = 90.0;
    std::string compare;
    std::string metrics;
    bool all_dynamic = false;
    bool json = false;
};

// Summary of the current run: paced trace metrics plus draw calls of the scene.
int cmd_perf(const PerfOptions& o) {
    if (o.scene.empty() && o.trace.empty() && o.metrics.empty()) throw Error("perf needs --scene, --trace or --metrics");
    perf::MetricsSummary current;
    if (!o.metrics.empty()) current = perf::MetricsSummary::from_json(Json::parse(read_file(o.metrics)));
    Json out = Json::object();

    if (!o.trace.empty()) {
        auto trace = perf::FrameTrace::parse(read_file(o.trace));
        auto paced = perf::pace(trace, perf::VSyncMode{perf::vsync_from_string(o.vsync), o.refresh});
        auto s = perf::summarize(paced);
        current.average_frame_time_ms = s.average_frame_time_ms;
        current.maximum_frame_time_ms = s.maximum_frame_time_ms;
        current.average_frame_rate_fps = s.average_frame_rate_fps;
        current.reciprocal_mean_fps = s.reciprocal_mean_fps;
        out["trace"] = {{"frames", paced.size()}, {"vsync", o.vsync}, {"refresh_hz", o.refresh},
                        {"kernels", perf::kernels::active().name}};
    }
    if (!o.scene.empty()) {
        auto scene = perf::SceneDescription::parse(read_file(o.scene));
        if (o.all_dynamic) scene = perf::all_dynamic(std::move(scene));
        auto calls = perf::batch(scene);
        Json batches = Json::array();
        for (const auto& c : calls) {
            batches.push_back({{"material", c.material},
                               {"mobility", c.mobility == perf::Mobility::Static ? "static" : "dynamic"},
                               {"objects", c.object_ids}});
        }
        out["scene"] = {{"objects", scene.objects.size()}, {"draw_calls", calls.size()}, {"batches", batches}};
        current.draw_call_peak = static_cast<double>(calls.size());
        current.draw_call_average = static_cast<double>(calls.size());
    }
    out["summary"] = current.to_json();

    std::optional<perf::ComparisonReport> comparison;
    if (!o.compare.empty()) {
        auto baseline = perf::MetricsSummary::from_json(Json::parse(read_file(o.compare)));
        comparison = perf::compare_runs(baseline, current);
        out["comparison"] = comparison->to_json();
    }

    if (o.json) {
        std::cout << to_canonical(out);
        return 0;
    }
    if (out.contains("trace")) std::cout << "kernels: " << perf::kernels::active().name << "\n";
    if (out.contains("scene")) {
        std::cout << "draw calls: " << out["scene"]["draw_calls"] << " for " << out["scene"]["objects"]
                  << " objects\n";
    }
    const auto row = [](const char* label, const std::optional<double>& v) {
        if (v) std::cout << label << *v << "\n";
    };
    row("avg frame time (ms)   ", current.average_frame_time_ms);
    row("max frame time (ms)   ", current.maximum_frame_time_ms);
    row("avg fps (mean 1000/t) ", current.average_frame_rate_fps);
    row("fps (1000/mean t)     ", current.reciprocal_mean_fps);
    row("draw calls (peak)     ", current.draw_call_peak);
    row("draw calls (avg)      ", current.draw_call_average);
    row("reserved memory (MB)  ", current.reserved_memory_peak_mb);
    if (comparison) std::cout << "\n" << comparison->to_text();
    return 0;
}

service::Server* g_server = nullptr;

int cmd_serve(service::StoreConfig config, const std::string& scenarios_dir) {
    config.validate();
    auto catalog = std::make_shared<service::ScenarioCatalog>(service::ScenarioCatalog::builtin());
    if (!scenarios_dir.empty()) catalog->load_directory(scenarios_dir);
    service::SessionStore store(config.data_dir, catalog);
    if (auto bad = store.verify_all(); !bad.empty()) {
        std::cerr << bad.size() << " stored session(s) fail replay, first: " << bad.front() << "\n";
    }
    service::Server server(store, config);
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    std::cerr << "serving " << store.size() << " stored session(s) from " << config.data_dir.string() << " on port "
              << config.listen_port << "\n";
    server.run();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VR engine-maintenance trainer tools"};
    app.require_subcommand(1);
    int rc = 0;

    std::string file;
    bool canonical = false;
    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("file", file, "Scenario JSON")->required();
    validate->add_flag("--canonical", canonical, "Print the canonical serialization");
    validate->callback([&] { rc = cmd_validate(file, canonical); });

    auto* invert = app.add_subcommand("invert", "Print the opposite-direction scenario");
    invert->add_option("file", file, "Scenario JSON")->required();
    invert->callback([&] { rc = cmd_invert(file); });

    std::string mode = "training", hints = "T3", session_id = "session-1", student, group, record_out;
    auto* run = app.add_subcommand("run", "Drive a session from stdin, one attempt per line");
    run->add_option("scenario", file, "Scenario file or built-in id")->required();
    run->add_option("--mode", mode, "training or exam")->check(CLI::IsMember({"training", "exam", "examination"}));
    run->add_option("--hints", hints, "T1, T2, T3 or none")->check(CLI::IsMember({"T1", "T2", "T3", "none"}));
    run->add_option("--session-id", session_id);
    run->add_option("--student", student);
    run->add_option("--group", group);
    run->add_option("--record", record_out, "Write the session record here");
    run->callback([&] { rc = cmd_run(file, mode, hints, session_id, student, group, record_out); });

    std::string scenario_ref;
    auto* replay_cmd = app.add_subcommand("replay", "Re-score a session record and compare");
    replay_cmd->add_option("record", file, "Session record JSON")->required();
    replay_cmd->add_option("--scenario", scenario_ref, "Scenario file or built-in id (default: the record's)");
    replay_cmd->callback([&] { rc = cmd_replay(file, scenario_ref); });

    std::string csv, store_dir, scenario_id;
    bool json = false;
    auto* report = app.add_subcommand("report", "Cohort band and stage tables");
    auto* csv_opt = report->add_option("--cohort", csv, "Cohort CSV");
    report->add_option("--store", store_dir, "Session store data directory")->excludes(csv_opt);
    report->add_option("--group", group, "Only this group");
    report->add_option("--scenario", scenario_id, "Only sessions of this scenario (store)");
    report->add_flag("--json", json);
    report->callback([&] { rc = cmd_report(csv, store_dir, group, scenario_id, json); });

    PerfOptions perf_options;
    auto* perf_cmd = app.add_subcommand("perf", "Frame pacing, draw-call batching and before/after tables");
    perf_cmd->add_option("--scene", perf_options.scene, "Scene JSON: list of {id, material, mobility}");
    perf_cmd->add_option("--trace", perf_options.trace, "Frame times in ms, one per line");
    perf_cmd->add_option("--vsync", perf_options.vsync)->check(CLI::IsMember({"dontsync", "every", "everysecond"}));
    perf_cmd->add_option("--refresh", perf_options.refresh, "Display refresh rate in Hz")->check(CLI::PositiveNumber);
    perf_cmd->add_option("--compare", perf_options.compare, "Baseline metrics JSON to compare against");
    perf_cmd->add_option("--metrics", perf_options.metrics, "Current-run metrics JSON (fields the trace/scene lack)");
    perf_cmd->add_flag("--all-dynamic", perf_options.all_dynamic, "Ignore static flags in the scene");
    perf_cmd->add_flag("--json", perf_options.json);
    perf_cmd->callback([&] { rc = cmd_perf(perf_options); });

    service::StoreConfig config;
    config.apply_environment();
    std::string data_dir, token, static_dir, scenarios_dir;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", config.listen_port)->check(CLI::Range(0, 65535));
    serve->add_option("--data", data_dir, "Data directory (default $TRAINER_DATA or ./trainer-data)");
    serve->add_option("--token", token, "Require this bearer token on session and cohort endpoints");
    serve->add_option("--static", static_dir, "Serve files from this directory at /");
    serve->add_option("--scenarios", scenarios_dir, "Extra scenario files");
    serve->callback([&] {
        if (!data_dir.empty()) config.data_dir = data_dir;
        if (!token.empty()) config.auth_token = token;
        if (!static_dir.empty()) config.static_dir = static_dir;
        rc = cmd_serve(config, scenarios_dir);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

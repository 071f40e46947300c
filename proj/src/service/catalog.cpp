#include "trainer/service/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "trainer/error.hpp"

namespace trainer::service {

namespace generated {
extern const std::string_view kVeranoS1S7;
}

std::string_view builtin_fixture(std::string_view id) {
    if (id == "verano-s1-s7") return generated::kVeranoS1S7;
    return {};
}

ScenarioCatalog ScenarioCatalog::builtin() {
    ScenarioCatalog c;
    auto verano = parse_scenario(generated::kVeranoS1S7);
    c.add(invert_scenario(verano));  // assembly direction
    c.add(std::move(verano));
    return c;
}

void ScenarioCatalog::add(Scenario scenario) {
    auto id = scenario.id;
    scenarios_[id] = std::make_shared<const Scenario>(std::move(scenario));
}

void ScenarioCatalog::load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) return;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            add(parse_scenario(ss.str()));
        } catch (const ScenarioError& e) {
            throw ScenarioError(e.kind(), f.string() + ": " + e.what(), e.ids());
        }
    }
}

std::shared_ptr<const Scenario> ScenarioCatalog::find(const std::string& id) const {
    auto it = scenarios_.find(id);
    return it == scenarios_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const Scenario>> ScenarioCatalog::list() const {
    std::vector<std::shared_ptr<const Scenario>> out;
    for (const auto& [id, s] : scenarios_) out.push_back(s);
    return out;
}

}  // namespace trainer::service

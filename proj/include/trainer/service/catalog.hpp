#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "trainer/scenario.hpp"

namespace trainer::service {

/// Scenarios the service can run and replay against.
class ScenarioCatalog {
public:
    /// Catalog holding the shipped fixtures and their inverses.
    static ScenarioCatalog builtin();

    void add(Scenario scenario);
    /// Loads every *.json under `dir`; throws ScenarioError on the first bad file.
    void load_directory(const std::filesystem::path& dir);

    [[nodiscard]] std::shared_ptr<const Scenario> find(const std::string& id) const;
    [[nodiscard]] std::vector<std::shared_ptr<const Scenario>> list() const;

private:
    std::map<std::string, std::shared_ptr<const Scenario>> scenarios_;
};

/// Raw text of a shipped fixture, or empty when unknown.
std::string_view builtin_fixture(std::string_view id);

}  // namespace trainer::service

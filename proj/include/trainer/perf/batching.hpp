#pragma once

// Draw-call batching: static objects sharing a material merge into one call,
// every dynamic object costs its own call.

#include <string>
#include <string_view>
#include <vector>

#include "trainer/canonical_json.hpp"

namespace trainer::perf {

enum class Mobility { Dynamic, Static };

struct SceneObject {
    std::string id;
    std::string material;
    Mobility mobility = Mobility::Dynamic;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct SceneDescription {
    std::vector<SceneObject> objects;

    /// JSON list of {id, material, mobility}.
    static SceneDescription parse(std::string_view document);
    [[nodiscard]] Json to_json() const;

    friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

struct DrawCall {
    std::string material;
    Mobility mobility = Mobility::Dynamic;
    std::vector<std::string> object_ids;

    friend bool operator==(const DrawCall&, const DrawCall&) = default;
};

/// Groups ordered by the position of their first object. Throws DomainError on duplicate ids.
std::vector<DrawCall> batch(const SceneDescription& scene);

/// Every object marked dynamic (the engine default).
SceneDescription all_dynamic(SceneDescription scene);

}  // namespace trainer::perf

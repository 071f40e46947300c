#include "trainer/perf/batching.hpp"

#include <map>
#include <set>

#include "trainer/error.hpp"

namespace trainer::perf {

SceneDescription SceneDescription::parse(std::string_view document) {
    Json doc;
    try {
        doc = Json::parse(document.begin(), document.end());
    } catch (const Json::parse_error& e) {
        throw DomainError(std::string("scene file: ") + e.what());
    }
    if (!doc.is_array()) throw DomainError("scene file must be a JSON list");
    SceneDescription scene;
    for (const auto& o : doc) {
        if (!o.is_object() || !o.contains("id") || !o.contains("material") || !o.contains("mobility")) {
            throw DomainError("scene object needs id, material and mobility");
        }
        SceneObject obj{o.at("id").get<std::string>(), o.at("material").get<std::string>(), Mobility::Dynamic};
        const auto mobility = o.at("mobility").get<std::string>();
        if (mobility == "static") {
            obj.mobility = Mobility::Static;
        } else if (mobility != "dynamic") {
            throw DomainError("unknown mobility '" + mobility + "'");
        }
        scene.objects.push_back(std::move(obj));
    }
    return scene;
}

Json SceneDescription::to_json() const {
    Json out = Json::array();
    for (const auto& o : objects) {
        out.push_back({{"id", o.id}, {"material", o.material},
                       {"mobility", o.mobility == Mobility::Static ? "static" : "dynamic"}});
    }
    return out;
}

std::vector<DrawCall> batch(const SceneDescription& scene) {
    std::set<std::string> ids;
    std::map<std::string, std::size_t> static_group;
    std::vector<DrawCall> calls;
    for (const auto& o : scene.objects) {
        if (!ids.insert(o.id).second) throw DomainError("duplicate scene object id '" + o.id + "'");
        if (o.mobility == Mobility::Dynamic) {
            calls.push_back({o.material, Mobility::Dynamic, {o.id}});
            continue;
        }
        auto [it, fresh] = static_group.emplace(o.material, calls.size());
        if (fresh) {
            calls.push_back({o.material, Mobility::Static, {o.id}});
        } else {
            calls[it->second].object_ids.push_back(o.id);
        }
    }
    return calls;
}

SceneDescription all_dynamic(SceneDescription scene) {
    for (auto& o : scene.objects) o.mobility = Mobility::Dynamic;
    return scene;
}

}  // namespace trainer::perf

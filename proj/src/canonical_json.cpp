#include "trainer/canonical_json.hpp"

#include <cstdio>

namespace trainer {

std::string to_canonical(const Json& value) {
    // nlohmann::json stores objects in std::map, so keys come out sorted.
    std::string out = value.dump(2, ' ', false, Json::error_handler_t::strict);
    out.push_back('\n');
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace trainer

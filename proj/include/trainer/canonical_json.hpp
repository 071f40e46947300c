#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace trainer {

using Json = nlohmann::json;

/// Sorted keys, 2-space indent, trailing newline.
std::string to_canonical(const Json& value);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace trainer

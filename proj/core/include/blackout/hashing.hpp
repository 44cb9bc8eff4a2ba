#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace blackout {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// 16 lowercase hex digits of fnv1a64.
std::string digest(std::string_view bytes);

/// Digest of a JSON value's compact serialization (keys are sorted by the
/// library, so equal documents digest equally).
std::string json_digest(const nlohmann::json& doc);

}  // namespace blackout

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sln {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

// One-shot HMAC-SHA-256.
Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg);

std::string to_hex(std::span<const std::uint8_t> data);

inline Bytes to_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }
inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

} // namespace sln

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace rell {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view data);

// Lowercase hex of the full digest.
std::string to_hex(const Sha256& digest);

// Lowercase hex of the first `nibbles` hex digits.
std::string to_hex_prefix(const Sha256& digest, std::size_t nibbles);

}  // namespace rell

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satakit {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class HexCase { Lower, Upper };

std::string to_hex(ByteView data, HexCase hex_case = HexCase::Lower);

/// Accepts either case. Throws Error{ParseError} on odd length or a non-hex
/// character.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

bool is_hex(std::string_view s) noexcept;

}  // namespace satakit

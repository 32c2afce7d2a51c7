#pragma once

#include <string>
#include <string_view>

#include "satakit/bytes.hpp"

namespace satakit::base32 {

/// RFC 4648 base32, lowercase alphabet, no padding.
std::string encode(ByteView data);

/// Decodes unpadded lowercase base32. Throws Error{BadAlphabet} with the
/// offending position; trailing bits that do not fill a byte must be zero.
Bytes decode(std::string_view text);

constexpr bool is_alphabet_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '2' && c <= '7');
}

}  // namespace satakit::base32

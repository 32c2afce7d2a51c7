#pragma once

#include <array>
#include <cstdint>

#include "satakit/bytes.hpp"

namespace satakit {

using Digest256 = std::array<std::uint8_t, 32>;

Digest256 sha256(ByteView data);
Digest256 sha3_256(ByteView data);

}  // namespace satakit

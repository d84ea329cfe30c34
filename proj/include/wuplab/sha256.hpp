#pragma once

#include <array>

#include "wuplab/bytes.hpp"

namespace wuplab {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(ByteView data);

}  // namespace wuplab

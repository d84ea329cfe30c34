#pragma once

#include <array>

#include "wuplab/bytes.hpp"

namespace wuplab {

using Md5Digest = std::array<std::uint8_t, 16>;

Md5Digest md5(ByteView data);

}  // namespace wuplab

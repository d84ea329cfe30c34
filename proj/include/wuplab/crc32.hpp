#pragma once

#include "wuplab/bytes.hpp"

namespace wuplab {

// Standard reflected CRC-32 (polynomial 0xEDB88320, init/final 0xFFFFFFFF).
std::uint32_t crc32(ByteView data);

}  // namespace wuplab

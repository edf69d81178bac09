#pragma once

namespace kandistill {

inline constexpr const char* kVersion = "0.1.0";

} // namespace kandistill

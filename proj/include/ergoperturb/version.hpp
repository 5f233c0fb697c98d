#pragma once

namespace ergo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ergo

#pragma once

namespace wgpr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wgpr

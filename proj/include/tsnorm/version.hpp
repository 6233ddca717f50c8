#pragma once

namespace tsnorm {

inline constexpr const char* kVersion = "tsnorm 0.1.0";

} // namespace tsnorm

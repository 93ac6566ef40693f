#pragma once

namespace jspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jspec

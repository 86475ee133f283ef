#pragma once

namespace qindep {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qindep

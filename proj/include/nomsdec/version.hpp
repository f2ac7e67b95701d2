#pragma once

namespace nomsdec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nomsdec

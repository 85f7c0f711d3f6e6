#pragma once

namespace ptforge {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionBanner = "pt-forge 0.1.0";

}  // namespace ptforge

#pragma once

namespace ioncrystal {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ioncrystal

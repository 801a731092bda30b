#pragma once

namespace cgdyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cgdyn

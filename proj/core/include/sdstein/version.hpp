#pragma once

namespace sdstein {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sdstein

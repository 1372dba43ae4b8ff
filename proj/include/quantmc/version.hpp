#pragma once

namespace quantmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quantmc

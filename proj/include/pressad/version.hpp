#pragma once

namespace pressad {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pressad

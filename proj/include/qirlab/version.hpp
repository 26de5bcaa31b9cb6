#pragma once

namespace qirlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qirlab

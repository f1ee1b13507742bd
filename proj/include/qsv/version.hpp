#pragma once

namespace qsv {

inline constexpr const char* kToolkitName = "qsv";
inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace qsv

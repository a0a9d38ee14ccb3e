#pragma once

namespace merw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace merw

#pragma once

namespace cheblr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cheblr

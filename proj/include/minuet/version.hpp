#pragma once

#include <string_view>

namespace minuet {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace minuet

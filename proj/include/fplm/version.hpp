#pragma once

namespace fplm {

inline constexpr const char* kVersion = "1.0.0";

} // namespace fplm

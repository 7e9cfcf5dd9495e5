#pragma once

namespace nflab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace nflab

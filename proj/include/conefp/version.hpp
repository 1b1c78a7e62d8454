#pragma once

namespace conefp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace conefp

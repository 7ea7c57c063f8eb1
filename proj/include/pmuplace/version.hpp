#pragma once

namespace pmuplace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pmuplace

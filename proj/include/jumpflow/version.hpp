#pragma once

namespace jumpflow {

inline constexpr const char* kVersion = "0.1.0";

} // namespace jumpflow

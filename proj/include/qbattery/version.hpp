#pragma once

namespace qbattery {

inline constexpr const char* kVersion = "qbattery 1.0.0";

}  // namespace qbattery

#pragma once

namespace franson {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

inline constexpr const char* kVersion = "franson 0.1.0";

}  // namespace franson

#pragma once

namespace dyadic {

inline constexpr int kDefaultResolutionCap = 22;
inline constexpr int kDefaultProductCellBits = 24;
inline constexpr long long kDefaultPowerBound = 1 << 12;

/// Current cap on resolution. Reads DYADIC_RESOLUTION_CAP once; set_resolution_cap overrides.
int resolution_cap();
void set_resolution_cap(int cap);

/// Throws ResourceError when resolution is negative or above the cap.
void check_resolution(int resolution);

}  // namespace dyadic

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rdlab {

// Simulation time in picoseconds.
using Ps = std::int64_t;

inline constexpr Ps kNever = std::numeric_limits<Ps>::max() / 4;
inline constexpr Ps kLongAgo = -kNever;

constexpr Ps from_ns(double ns) {
  return static_cast<Ps>(ns * 1000.0 + (ns >= 0 ? 0.5 : -0.5));
}

constexpr double to_ns(Ps t) { return static_cast<double>(t) / 1000.0; }

constexpr Ps ceil_to(Ps t, Ps period) {
  if (t <= 0) return 0;
  return ((t + period - 1) / period) * period;
}

}  // namespace rdlab

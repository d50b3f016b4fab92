#pragma once

#include <cstdint>

namespace fbsas {

/// Simulated time in integer nanoseconds. Never coupled to the wall clock.
using VirtualTime = std::int64_t;

constexpr VirtualTime kNanosPerMilli = 1'000'000;

constexpr VirtualTime from_ms(std::int64_t ms) { return ms * kNanosPerMilli; }
constexpr std::int64_t to_ms(VirtualTime t) { return t / kNanosPerMilli; }

} // namespace fbsas

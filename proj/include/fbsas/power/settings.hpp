#pragma once

#include <cstdint>

namespace fbsas::power {

/// Definite-time overcurrent element.
struct PtocSettings {
	double pickup = 400.0; ///< amperes; Str when a sample is strictly above
	std::int32_t operate_delay_ms = 50;
};

/// Mechanical transit times; the position reads intermediate while moving.
struct BreakerSettings {
	std::int32_t open_ms = 40;
	std::int32_t close_ms = 60;
};

struct RecloserSettings {
	std::int32_t dead_time_ms = 500;
	std::int32_t reclaim_time_ms = 2000;
	std::int32_t max_shots = 3;
};

struct FeederSettings {
	std::int32_t sample_ms = 10;
};

/// Throws fbsas::Error when a field is out of range.
void validate(const PtocSettings &s);
void validate(const BreakerSettings &s);
void validate(const RecloserSettings &s);

} // namespace fbsas::power

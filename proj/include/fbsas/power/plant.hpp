#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "fbsas/power/ln_blocks.hpp"

namespace fbsas::fb {
class Resource;
class TypeRegistry;
} // namespace fbsas::fb

namespace fbsas::power {

/// Simulated primary equipment of the feeder as seen by the operator.
struct FeederState {
	bool disconnector_closed = true;
	std::string breaker_pos = "on";
	double load_setpoint = 0.0;
	std::optional<double> fault_overlay;
	/// Last CT sample.
	double current = 0.0;
	RecloserState recloser;
};

nlohmann::ordered_json to_json(const FeederState &s);

/// Current the CT measures for a plant state: the larger of load and fault current when
/// the disconnector is closed and the breaker is on, else zero.
double feeder_current(bool disconnector_closed, std::string_view breaker_pos, double load,
                      std::optional<double> fault);

/// Registers the algorithms of the plant basic types (ids "plant.*").
void register_plant_algorithms(fb::TypeRegistry &registry);

/// Reads the plant blocks of a FEEDER composite instance (load, disconnector, breaker
/// model and CT calculation).
FeederState read_feeder(const fb::Resource &plant, std::string_view instance);

} // namespace fbsas::power

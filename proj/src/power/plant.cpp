#include "fbsas/power/plant.hpp"

#include <algorithm>

#include "fbsas/fb/basic_fb.hpp"
#include "fbsas/fb/registry.hpp"
#include "fbsas/fb/system.hpp"

namespace fbsas::power {

nlohmann::ordered_json to_json(const FeederState &s)
{
	nlohmann::ordered_json j;
	j["disconnector"] = s.disconnector_closed ? "closed" : "open";
	j["breaker_pos"] = s.breaker_pos;
	j["load_setpoint"] = s.load_setpoint;
	j["fault_overlay"] = s.fault_overlay ? nlohmann::ordered_json(*s.fault_overlay) : nlohmann::ordered_json();
	j["current"] = s.current;
	j["recloser"] = to_json(s.recloser);
	return j;
}

double feeder_current(bool disconnector_closed, std::string_view breaker_pos, double load, std::optional<double> fault)
{
	if (!disconnector_closed || breaker_pos != "on")
		return 0.0;
	return std::max(load, fault.value_or(0.0));
}

void register_plant_algorithms(fb::TypeRegistry &r)
{
	r.add_algorithm("plant.load_set", [](fb::VarAccess &v) {
		if (v.as<double>("AMPS") >= 0.0)
			v.set("LOAD", v.get("AMPS"));
	});
	r.add_algorithm("plant.fault_set", [](fb::VarAccess &v) {
		if (v.as<double>("AMPS") >= 0.0) {
			v.set("FAULT", v.get("AMPS"));
			v.set("FAULTED", true);
		}
	});
	r.add_algorithm("plant.fault_clear", [](fb::VarAccess &v) {
		v.set("FAULT", 0.0);
		v.set("FAULTED", false);
	});
	r.add_algorithm("plant.disc_open", [](fb::VarAccess &v) { v.set("CLOSED", false); });
	r.add_algorithm("plant.disc_close", [](fb::VarAccess &v) { v.set("CLOSED", true); });
	r.add_algorithm("plant.brk_pos", [](fb::VarAccess &v) {
		v.set("CONDUCTING", v.as<Enumerated>("POS").value == "on");
	});
	r.add_algorithm("plant.ct_calc", [](fb::VarAccess &v) {
		std::optional<double> fault;
		if (v.as<bool>("FAULTED"))
			fault = v.as<double>("FAULT");
		const bool live = v.as<bool>("ENERGIZED") && v.as<bool>("CONDUCTING");
		v.set("AMP", feeder_current(v.as<bool>("CLOSED"), live ? "on" : "off", v.as<double>("LOAD"), fault));
	});
}

FeederState read_feeder(const fb::Resource &plant, std::string_view instance)
{
	auto block = [&](const char *inner) -> const fb::BasicFunctionBlock & {
		auto name = std::string(instance) + "." + inner;
		const auto *fb = dynamic_cast<const fb::BasicFunctionBlock *>(plant.find(name));
		if (!fb)
			throw Error(plant.path() + ": no plant block " + name);
		return *fb;
	};
	FeederState s;
	const auto &load = block("LOAD");
	s.load_setpoint = std::get<double>(load.variable("LOAD"));
	if (std::get<bool>(load.variable("FAULTED")))
		s.fault_overlay = std::get<double>(load.variable("FAULT"));
	s.disconnector_closed = std::get<bool>(block("DISC").variable("CLOSED"));
	s.breaker_pos = std::get<Enumerated>(block("BRK").variable("POS")).value;
	s.current = std::get<double>(block("CT.CALC").variable("AMP"));
	return s;
}

} // namespace fbsas::power

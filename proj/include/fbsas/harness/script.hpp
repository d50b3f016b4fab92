#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/core/error.hpp"
#include "fbsas/core/time.hpp"

namespace fbsas::harness {

class ScriptError : public Error {
public:
	using Error::Error;
};

enum class ScriptAction { set_load, set_fault, clear_fault, open_disc, close_disc };

std::string_view to_string(ScriptAction a);

struct ScriptStep {
	VirtualTime at = 0;
	ScriptAction action = ScriptAction::set_load;
	double amps = 0.0; ///< set_load and set_fault only

	friend bool operator==(const ScriptStep &, const ScriptStep &) = default;
};

/// Timed operator actions on the feeder. Steps are kept in time order; steps sharing a
/// time keep their file order.
struct Script {
	std::string name;
	VirtualTime horizon = 0; ///< 0: none given
	std::vector<ScriptStep> steps;
};

/// {"name", "horizon_ms", "steps": [{"at_ms", "action", "amps"}]}
Script script_from_json(const nlohmann::json &j);
Script load_script_file(const std::filesystem::path &path);
nlohmann::ordered_json to_json(const ScriptStep &s);

} // namespace fbsas::harness

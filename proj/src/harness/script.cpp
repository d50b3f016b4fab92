#include "fbsas/harness/script.hpp"

#include <algorithm>
#include <fstream>

namespace fbsas::harness {

namespace {

constexpr std::pair<ScriptAction, std::string_view> kActions[] = {
	{ScriptAction::set_load, "set_load"},       {ScriptAction::set_fault, "set_fault"},
	{ScriptAction::clear_fault, "clear_fault"}, {ScriptAction::open_disc, "open_disc"},
	{ScriptAction::close_disc, "close_disc"},
};

bool takes_amps(ScriptAction a)
{
	return a == ScriptAction::set_load || a == ScriptAction::set_fault;
}

} // namespace

std::string_view to_string(ScriptAction a)
{
	for (auto [k, name] : kActions)
		if (k == a)
			return name;
	return "?";
}

Script script_from_json(const nlohmann::json &j)
{
	Script s;
	try {
		s.name = j.value("name", "");
		if (j.contains("horizon_ms")) {
			auto h = j.at("horizon_ms").get<std::int64_t>();
			if (h <= 0)
				throw ScriptError("horizon_ms must be positive");
			s.horizon = from_ms(h);
		}
		std::size_t i = 0;
		for (const auto &st : j.value("steps", nlohmann::json::array())) {
			const auto where = "steps[" + std::to_string(i++) + "]: ";
			ScriptStep step;
			auto at = st.at("at_ms").get<std::int64_t>();
			if (at < 0)
				throw ScriptError(where + "at_ms must not be negative");
			step.at = from_ms(at);
			auto name = st.at("action").get<std::string>();
			auto it = std::find_if(std::begin(kActions), std::end(kActions), [&](auto &p) { return p.second == name; });
			if (it == std::end(kActions))
				throw ScriptError(where + "unknown action '" + name + "'");
			step.action = it->first;
			if (takes_amps(step.action)) {
				step.amps = st.at("amps").get<double>();
				if (step.amps < 0)
					throw ScriptError(where + "amps must not be negative");
			}
			s.steps.push_back(step);
		}
	} catch (const nlohmann::json::exception &e) {
		throw ScriptError(std::string("script: ") + e.what());
	}
	std::stable_sort(s.steps.begin(), s.steps.end(), [](auto &a, auto &b) { return a.at < b.at; });
	return s;
}

Script load_script_file(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw ScriptError("cannot open script " + path.string());
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(in);
	} catch (const nlohmann::json::exception &e) {
		throw ScriptError(path.string() + ": " + e.what());
	}
	auto s = script_from_json(j);
	if (s.name.empty())
		s.name = path.stem().string();
	return s;
}

nlohmann::ordered_json to_json(const ScriptStep &s)
{
	nlohmann::ordered_json j;
	j["action"] = to_string(s.action);
	if (takes_amps(s.action))
		j["amps"] = s.amps;
	return j;
}

} // namespace fbsas::harness

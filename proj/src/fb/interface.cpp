#include "fbsas/fb/interface.hpp"

#include <algorithm>
#include <set>

#include "fbsas/core/error.hpp"

namespace fbsas::fb {

namespace {

template <class Port>
auto find_port(auto &ports, std::string_view name) -> Port *
{
	auto it = std::find_if(ports.begin(), ports.end(), [&](const auto &p) { return p.name == name; });
	return it == ports.end() ? nullptr : &*it;
}

std::vector<EventPort> events_from_json(const nlohmann::json &j, Direction dir)
{
	std::vector<EventPort> out;
	for (const auto &e : j) {
		EventPort p {e.at("name").get<std::string>(), dir, {}};
		if (e.contains("with"))
			p.with = e.at("with").get<std::vector<std::string>>();
		out.push_back(std::move(p));
	}
	return out;
}

std::vector<DataPort> data_from_json(const nlohmann::json &j, Direction dir)
{
	std::vector<DataPort> out;
	for (const auto &d : j) {
		auto type = parse_type(d.at("type").get<std::string>());
		DataValue v = d.contains("init") ? coerce(d.at("init"), type) : default_value(type);
		out.push_back({d.at("name").get<std::string>(), dir, std::move(v)});
	}
	return out;
}

} // namespace

const EventPort *InterfaceDecl::event_input(std::string_view name) const
{
	return find_port<const EventPort>(event_inputs, name);
}

const EventPort *InterfaceDecl::event_output(std::string_view name) const
{
	return find_port<const EventPort>(event_outputs, name);
}

const DataPort *InterfaceDecl::data_input(std::string_view name) const
{
	return find_port<const DataPort>(data_inputs, name);
}

const DataPort *InterfaceDecl::data_output(std::string_view name) const
{
	return find_port<const DataPort>(data_outputs, name);
}

DataPort *InterfaceDecl::data_input(std::string_view name)
{
	return find_port<DataPort>(data_inputs, name);
}

DataPort *InterfaceDecl::data_output(std::string_view name)
{
	return find_port<DataPort>(data_outputs, name);
}

void InterfaceDecl::validate(std::string_view owner) const
{
	std::set<std::string_view> names;
	auto claim = [&](const std::string &n) {
		if (!names.insert(n).second)
			throw Error(std::string(owner) + ": duplicate port name '" + n + "'");
	};
	for (const auto &e : event_inputs) claim(e.name);
	for (const auto &e : event_outputs) claim(e.name);
	for (const auto &d : data_inputs) claim(d.name);
	for (const auto &d : data_outputs) claim(d.name);

	for (const auto &e : event_inputs)
		for (const auto &w : e.with)
			if (!data_input(w))
				throw Error(std::string(owner) + ": event input " + e.name + " is WITH '" + w +
				            "', which is not a data input");
	for (const auto &e : event_outputs)
		for (const auto &w : e.with)
			if (!data_output(w))
				throw Error(std::string(owner) + ": event output " + e.name + " is WITH '" + w +
				            "', which is not a data output");
}

InterfaceDecl &InterfaceDecl::in_event(std::string name, std::vector<std::string> with)
{
	event_inputs.push_back({std::move(name), Direction::input, std::move(with)});
	return *this;
}

InterfaceDecl &InterfaceDecl::out_event(std::string name, std::vector<std::string> with)
{
	event_outputs.push_back({std::move(name), Direction::output, std::move(with)});
	return *this;
}

InterfaceDecl &InterfaceDecl::in_data(std::string name, DataValue initial)
{
	data_inputs.push_back({std::move(name), Direction::input, std::move(initial)});
	return *this;
}

InterfaceDecl &InterfaceDecl::out_data(std::string name, DataValue initial)
{
	data_outputs.push_back({std::move(name), Direction::output, std::move(initial)});
	return *this;
}

InterfaceDecl interface_from_json(const nlohmann::json &j)
{
	InterfaceDecl d;
	if (j.contains("event_inputs")) d.event_inputs = events_from_json(j.at("event_inputs"), Direction::input);
	if (j.contains("event_outputs")) d.event_outputs = events_from_json(j.at("event_outputs"), Direction::output);
	if (j.contains("data_inputs")) d.data_inputs = data_from_json(j.at("data_inputs"), Direction::input);
	if (j.contains("data_outputs")) d.data_outputs = data_from_json(j.at("data_outputs"), Direction::output);
	return d;
}

} // namespace fbsas::fb

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fbsas/core/value.hpp"

namespace fbsas::fb {

enum class Direction { input, output };

struct EventPort {
	std::string name;
	Direction direction = Direction::input;
	/// Data ports sampled (inputs) or published (outputs) together with the event.
	std::vector<std::string> with;
};

/// A data port; its type is the type of its current value and never changes.
struct DataPort {
	std::string name;
	Direction direction = Direction::input;
	DataValue value;
};

/// Event/data interface of a function block type.
struct InterfaceDecl {
	std::vector<EventPort> event_inputs;
	std::vector<EventPort> event_outputs;
	std::vector<DataPort> data_inputs;
	std::vector<DataPort> data_outputs;

	const EventPort *event_input(std::string_view name) const;
	const EventPort *event_output(std::string_view name) const;
	const DataPort *data_input(std::string_view name) const;
	const DataPort *data_output(std::string_view name) const;
	DataPort *data_input(std::string_view name);
	DataPort *data_output(std::string_view name);

	/// Throws fbsas::Error on duplicate names or WITH lists naming missing ports.
	void validate(std::string_view owner) const;

	/// Builder helpers.
	InterfaceDecl &in_event(std::string name, std::vector<std::string> with = {});
	InterfaceDecl &out_event(std::string name, std::vector<std::string> with = {});
	InterfaceDecl &in_data(std::string name, DataValue initial);
	InterfaceDecl &out_data(std::string name, DataValue initial);
};

/// JSON form: {"event_inputs":[{"name":"REQ","with":["X"]}], "data_inputs":[{"name":"X","type":"f64","init":0.0}], ...}
InterfaceDecl interface_from_json(const nlohmann::json &j);

} // namespace fbsas::fb

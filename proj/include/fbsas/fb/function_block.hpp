#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbsas/core/time.hpp"
#include "fbsas/fb/interface.hpp"

namespace fbsas::fb {

class Resource;
class SystemModel;

using TimerId = std::uint64_t;

/// Handed to a function block while it reacts to one event. Valid only for the duration of
/// that call.
class EventContext {
public:
	EventContext(Resource &resource, std::size_t fb_index) : resource_(resource), fb_(fb_index) {}

	VirtualTime now() const;

	/// Raises a declared output event of the current block.
	void emit(std::string_view output_event);

	/// Schedules `on_internal(tag, payload)` on the current block after `delay`.
	TimerId schedule(std::string tag, VirtualTime delay, std::vector<DataValue> payload = {});
	void cancel(TimerId id);

	Resource &resource() { return resource_; }
	std::size_t index() const { return fb_; }
	SystemModel &system();

private:
	Resource &resource_;
	std::size_t fb_;
};

/// Common base of basic and service interface blocks. Composite blocks are flattened into
/// their leaves when a system is loaded, so they never exist as instances.
class FunctionBlock {
public:
	FunctionBlock(std::string instance_name, std::string type_name, InterfaceDecl iface);
	virtual ~FunctionBlock() = default;

	FunctionBlock(const FunctionBlock &) = delete;
	FunctionBlock &operator=(const FunctionBlock &) = delete;

	const std::string &name() const { return name_; }
	const std::string &type_name() const { return type_name_; }
	const InterfaceDecl &interface() const { return iface_; }

	const DataValue &input(std::string_view port) const;
	const DataValue &output(std::string_view port) const;
	/// Type-checked; throws TypeMismatch when the variant differs from the port's.
	void set_input(std::string_view port, DataValue v);
	void set_output(std::string_view port, DataValue v);

	template <class T> const T &in(std::string_view port) const { return std::get<T>(input(port)); }
	template <class T> const T &out(std::string_view port) const { return std::get<T>(output(port)); }

	/// Reaction to a declared input event; WITH inputs are already sampled.
	virtual void on_event(std::string_view event, EventContext &ctx) = 0;
	/// Reaction to a self-scheduled timer or a delivery from a communication service.
	virtual void on_internal(std::string_view tag, std::span<const DataValue> payload, EventContext &ctx);
	virtual void on_start(EventContext &) {}
	virtual void on_stop() {}

protected:
	InterfaceDecl iface_;

private:
	std::string name_;
	std::string type_name_;
};

} // namespace fbsas::fb

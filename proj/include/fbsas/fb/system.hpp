#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fbsas/core/error.hpp"
#include "fbsas/core/trace.hpp"
#include "fbsas/fb/function_block.hpp"
#include "fbsas/fb/inbound_queue.hpp"

namespace fbsas::fb {

class Device;
class SystemModel;

class ResourceStopped : public Error {
public:
	using Error::Error;
};

/// A leaf block port inside one resource.
struct Endpoint {
	std::size_t fb = 0;
	std::string port;

	friend bool operator==(const Endpoint &, const Endpoint &) = default;
};

/// Splits "FB.PORT" at the last dot. Throws when there is no dot.
std::pair<std::string, std::string> split_endpoint(std::string_view text);

/// Independently startable network of function blocks. Events raised inside a resource
/// propagate to completion (FIFO) before the scheduler takes its next queued event.
class Resource {
public:
	Resource(Device &device, std::string name);

	Resource(const Resource &) = delete;
	Resource &operator=(const Resource &) = delete;

	const std::string &name() const { return name_; }
	Device &device() { return device_; }
	const Device &device() const { return device_; }
	std::string path() const;
	bool running() const { return running_; }

	FunctionBlock &add(std::unique_ptr<FunctionBlock> fb);
	FunctionBlock *find(std::string_view instance);
	const FunctionBlock *find(std::string_view instance) const;
	std::size_t index_of(std::string_view instance) const;
	FunctionBlock &at(std::size_t i) { return *blocks_[i]; }
	const std::vector<std::unique_ptr<FunctionBlock>> &blocks() const { return blocks_; }

	template <class T> T &get(std::string_view instance)
	{
		auto *fb = dynamic_cast<T *>(find(instance));
		if (!fb)
			throw Error(path() + ": no block '" + std::string(instance) + "' of the requested type");
		return *fb;
	}

	/// "A.EO" -> "B.EI". Either side may name a composite boundary port.
	void connect_event(std::string_view from, std::string_view to);
	/// "A.OUT" -> "B.IN". A data input accepts at most one source.
	void connect_data(std::string_view from, std::string_view to);

	/// Composite boundary bindings installed when a composite instance is flattened.
	void bind_event_input(std::string port, std::vector<Endpoint> leaves);
	void bind_event_output(std::string port, std::vector<Endpoint> leaves);
	void bind_data_input(std::string port, std::vector<Endpoint> leaves);
	void bind_data_output(std::string port, Endpoint leaf);
	bool is_composite_instance(std::string_view instance) const;

	/// Leaf input events reached by "FB.EVENT" (a leaf port or a composite boundary port).
	std::vector<Endpoint> resolve_event_input(std::string_view fb_event) const;
	std::vector<Endpoint> resolve_data_input(std::string_view fb_port) const;
	std::vector<Endpoint> resolve_event_output(std::string_view fb_event) const;
	/// Empty when a composite output is declared but not bound inside its type.
	std::optional<Endpoint> resolve_data_output(std::string_view fb_port) const;

	void start();
	void stop();

private:
	friend class SystemModel;
	friend class EventContext;

	struct Pending {
		std::size_t fb;
		std::string event;
	};

	void run_input(std::size_t fb, const std::string &event, const std::vector<std::pair<std::string, DataValue>> &data);
	void run_internal(std::size_t fb, const std::string &tag, const std::vector<DataValue> &payload);
	void drain_chain();
	void sample_with(std::size_t fb, const std::string &event);
	void emit_from(std::size_t fb, std::string_view event);
	void trace_event(std::size_t fb, const char *dir, std::string_view event);

	Device &device_;
	std::string name_;
	bool running_ = false;
	std::vector<std::unique_ptr<FunctionBlock>> blocks_;
	std::map<std::string, std::size_t, std::less<>> index_;
	std::map<std::pair<std::size_t, std::string>, std::vector<Endpoint>> event_links_;
	std::map<std::pair<std::size_t, std::string>, Endpoint> data_links_; ///< destination -> source
	std::map<std::string, std::vector<Endpoint>, std::less<>> bound_event_in_, bound_event_out_, bound_data_in_;
	std::map<std::string, Endpoint, std::less<>> bound_data_out_;
	std::set<std::string, std::less<>> composite_instances_;
	std::deque<Pending> chain_;
};

class Device {
public:
	Device(SystemModel &system, std::string name, std::string address);

	Device(const Device &) = delete;
	Device &operator=(const Device &) = delete;

	const std::string &name() const { return name_; }
	const std::string &address() const { return address_; }
	/// Name of the substation IED this device implements; empty for non-IED devices.
	const std::string &ied() const { return ied_; }
	void set_ied(std::string ied) { ied_ = std::move(ied); }

	SystemModel &system() { return system_; }
	Resource &add_resource(std::string name);
	Resource *find_resource(std::string_view name);
	const std::vector<std::unique_ptr<Resource>> &resources() const { return resources_; }

	/// Logical device a resource's logical node belongs to, when declared.
	void set_resource_ld(std::string resource, std::string ld) { resource_ld_[std::move(resource)] = std::move(ld); }
	std::string resource_ld(std::string_view resource) const;

private:
	SystemModel &system_;
	std::string name_;
	std::string address_;
	std::string ied_;
	std::vector<std::unique_ptr<Resource>> resources_;
	std::map<std::string, std::string, std::less<>> resource_ld_;
};

class TopicBus;

/// Devices plus the deterministic virtual-time scheduler driving them. Single-threaded:
/// other threads talk to it only through `inbound()`.
class SystemModel {
public:
	SystemModel();
	~SystemModel();

	SystemModel(const SystemModel &) = delete;
	SystemModel &operator=(const SystemModel &) = delete;

	Device &add_device(std::string name, std::string address = {});
	Device *find_device(std::string_view name);
	const std::vector<std::unique_ptr<Device>> &devices() const { return devices_; }
	/// "DEVICE/RESOURCE"
	Resource *find_resource(std::string_view path);
	Resource &resource(std::string_view path);

	VirtualTime now() const { return now_; }

	/// Starts every resource (declaration order) at the current time.
	void start();

	/// Queues an input event. Ties at equal times are broken by enqueue order.
	TimerId dispatch_event(Resource &resource, std::string_view fb_instance, std::string_view event, VirtualTime at,
	                       std::vector<std::pair<std::string, DataValue>> data = {});
	TimerId schedule_internal(Resource &resource, std::size_t fb, std::string tag, VirtualTime at,
	                          std::vector<DataValue> payload = {});
	TimerId schedule_task(VirtualTime at, std::string source, std::function<void()> task);
	void cancel(TimerId id);

	/// Processes every queued event with time <= until, then advances the clock to `until`.
	std::vector<TraceRecord> step(VirtualTime until);
	std::optional<VirtualTime> next_event_time() const;

	InboundQueue &inbound() { return inbound_; }
	TopicBus &topics() { return *topics_; }

	void set_trace_sink(TraceSink sink) { sink_ = std::move(sink); }
	void trace(TraceRecord record);

private:
	struct Item {
		enum class Kind { input, internal, task };
		VirtualTime time = 0;
		TimerId seq = 0;
		Kind kind = Kind::input;
		Resource *resource = nullptr;
		std::size_t fb = 0;
		std::string name;
		std::vector<std::pair<std::string, DataValue>> data;
		std::vector<DataValue> payload;
		std::function<void()> task;
	};

	TimerId push(Item item);
	void drain_inbound();
	void execute(Item &item);

	std::vector<std::unique_ptr<Device>> devices_;
	std::vector<Item> heap_;
	std::unordered_set<TimerId> cancelled_;
	TimerId next_seq_ = 1;
	VirtualTime now_ = 0;
	InboundQueue inbound_;
	std::unique_ptr<TopicBus> topics_;
	TraceSink sink_;
	std::vector<TraceRecord> *collect_ = nullptr;
};

} // namespace fbsas::fb

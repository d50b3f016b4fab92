#include "fbsas/fb/system.hpp"

#include <algorithm>

#include "fbsas/fb/topic_bus.hpp"

namespace fbsas::fb {

namespace {

bool later(const auto &a, const auto &b)
{
	return a.time > b.time || (a.time == b.time && a.seq > b.seq);
}

std::pair<std::string_view, std::string_view> split_path(std::string_view path)
{
	auto slash = path.find('/');
	if (slash == std::string_view::npos)
		throw Error("'" + std::string(path) + "' is not of the form DEVICE/RESOURCE");
	return {path.substr(0, slash), path.substr(slash + 1)};
}

} // namespace

std::pair<std::string, std::string> split_endpoint(std::string_view text)
{
	auto dot = text.rfind('.');
	if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
		throw Error("'" + std::string(text) + "' is not of the form FB.PORT");
	return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

// ---------------------------------------------------------------------------------------
// EventContext

VirtualTime EventContext::now() const
{
	return resource_.device().system().now();
}

void EventContext::emit(std::string_view output_event)
{
	resource_.emit_from(fb_, output_event);
}

TimerId EventContext::schedule(std::string tag, VirtualTime delay, std::vector<DataValue> payload)
{
	auto &sys = resource_.device().system();
	return sys.schedule_internal(resource_, fb_, std::move(tag), sys.now() + delay, std::move(payload));
}

void EventContext::cancel(TimerId id)
{
	resource_.device().system().cancel(id);
}

SystemModel &EventContext::system()
{
	return resource_.device().system();
}

// ---------------------------------------------------------------------------------------
// Resource

Resource::Resource(Device &device, std::string name) : device_(device), name_(std::move(name)) {}

std::string Resource::path() const
{
	return device_.name() + "/" + name_;
}

FunctionBlock &Resource::add(std::unique_ptr<FunctionBlock> fb)
{
	const auto &n = fb->name();
	if (index_.contains(n) || composite_instances_.contains(n))
		throw Error(path() + ": duplicate block name '" + n + "'");
	index_.emplace(n, blocks_.size());
	blocks_.push_back(std::move(fb));
	return *blocks_.back();
}

FunctionBlock *Resource::find(std::string_view instance)
{
	auto it = index_.find(instance);
	return it == index_.end() ? nullptr : blocks_[it->second].get();
}

const FunctionBlock *Resource::find(std::string_view instance) const
{
	auto it = index_.find(instance);
	return it == index_.end() ? nullptr : blocks_[it->second].get();
}

std::size_t Resource::index_of(std::string_view instance) const
{
	auto it = index_.find(instance);
	if (it == index_.end())
		throw Error(path() + ": unknown block '" + std::string(instance) + "'");
	return it->second;
}

void Resource::bind_event_input(std::string port, std::vector<Endpoint> leaves)
{
	composite_instances_.insert(split_endpoint(port).first);
	bound_event_in_[std::move(port)] = std::move(leaves);
}

void Resource::bind_event_output(std::string port, std::vector<Endpoint> leaves)
{
	composite_instances_.insert(split_endpoint(port).first);
	bound_event_out_[std::move(port)] = std::move(leaves);
}

void Resource::bind_data_input(std::string port, std::vector<Endpoint> leaves)
{
	composite_instances_.insert(split_endpoint(port).first);
	bound_data_in_[std::move(port)] = std::move(leaves);
}

void Resource::bind_data_output(std::string port, Endpoint leaf)
{
	composite_instances_.insert(split_endpoint(port).first);
	bound_data_out_[std::move(port)] = std::move(leaf);
}

bool Resource::is_composite_instance(std::string_view instance) const
{
	return composite_instances_.contains(instance);
}

std::vector<Endpoint> Resource::resolve_event_input(std::string_view fb_event) const
{
	auto [fb, port] = split_endpoint(fb_event);
	if (auto it = index_.find(fb); it != index_.end()) {
		if (!blocks_[it->second]->interface().event_input(port))
			throw Error(path() + ": '" + std::string(fb_event) + "' is not an input event");
		return {{it->second, port}};
	}
	if (auto it = bound_event_in_.find(fb_event); it != bound_event_in_.end())
		return it->second;
	if (composite_instances_.contains(fb))
		throw Error(path() + ": '" + std::string(fb_event) + "' is not an input event");
	throw Error(path() + ": unknown block '" + fb + "' in '" + std::string(fb_event) + "'");
}

std::vector<Endpoint> Resource::resolve_event_output(std::string_view fb_event) const
{
	auto [fb, port] = split_endpoint(fb_event);
	if (auto it = index_.find(fb); it != index_.end()) {
		if (!blocks_[it->second]->interface().event_output(port))
			throw Error(path() + ": '" + std::string(fb_event) + "' is not an output event");
		return {{it->second, port}};
	}
	if (auto it = bound_event_out_.find(fb_event); it != bound_event_out_.end())
		return it->second;
	if (composite_instances_.contains(fb))
		throw Error(path() + ": '" + std::string(fb_event) + "' is not an output event");
	throw Error(path() + ": unknown block '" + fb + "' in '" + std::string(fb_event) + "'");
}

std::vector<Endpoint> Resource::resolve_data_input(std::string_view fb_port) const
{
	auto [fb, port] = split_endpoint(fb_port);
	if (auto it = index_.find(fb); it != index_.end()) {
		if (!blocks_[it->second]->interface().data_input(port))
			throw Error(path() + ": '" + std::string(fb_port) + "' is not a data input");
		return {{it->second, port}};
	}
	if (auto it = bound_data_in_.find(fb_port); it != bound_data_in_.end())
		return it->second;
	if (composite_instances_.contains(fb))
		throw Error(path() + ": '" + std::string(fb_port) + "' is not a data input");
	throw Error(path() + ": unknown block '" + fb + "' in '" + std::string(fb_port) + "'");
}

std::optional<Endpoint> Resource::resolve_data_output(std::string_view fb_port) const
{
	auto [fb, port] = split_endpoint(fb_port);
	if (auto it = index_.find(fb); it != index_.end()) {
		if (!blocks_[it->second]->interface().data_output(port))
			throw Error(path() + ": '" + std::string(fb_port) + "' is not a data output");
		return Endpoint {it->second, port};
	}
	if (auto it = bound_data_out_.find(fb_port); it != bound_data_out_.end())
		return it->second;
	if (composite_instances_.contains(fb))
		throw Error(path() + ": '" + std::string(fb_port) + "' is not a data output");
	throw Error(path() + ": unknown block '" + fb + "' in '" + std::string(fb_port) + "'");
}

void Resource::connect_event(std::string_view from, std::string_view to)
{
	auto sources = resolve_event_output(from);
	auto targets = resolve_event_input(to);
	for (const auto &s : sources) {
		auto &links = event_links_[{s.fb, s.port}];
		links.insert(links.end(), targets.begin(), targets.end());
	}
}

void Resource::connect_data(std::string_view from, std::string_view to)
{
	auto source = resolve_data_output(from);
	if (!source)
		throw Error(path() + ": composite output '" + std::string(from) + "' is not bound inside its type");
	const auto &src_value = blocks_[source->fb]->interface().data_output(source->port)->value;
	for (const auto &t : resolve_data_input(to)) {
		const auto &dst_value = blocks_[t.fb]->interface().data_input(t.port)->value;
		if (!same_type(src_value, dst_value))
			throw TypeMismatch(path() + ": cannot connect " + std::string(from) + " (" +
			                   fbsas::type_name(type_of(src_value)) + ") to " + std::string(to) + " (" +
			                   fbsas::type_name(type_of(dst_value)) + ")");
		auto [it, inserted] = data_links_.emplace(std::pair {t.fb, t.port}, *source);
		if (!inserted)
			throw Error(path() + ": data input " + std::string(to) + " already has a source");
	}
}

void Resource::start()
{
	running_ = true;
	for (std::size_t i = 0; i < blocks_.size(); ++i) {
		EventContext ctx(*this, i);
		blocks_[i]->on_start(ctx);
	}
	drain_chain();
}

void Resource::stop()
{
	running_ = false;
	chain_.clear();
	for (auto &b : blocks_)
		b->on_stop();
}

void Resource::trace_event(std::size_t fb, const char *dir, std::string_view event)
{
	auto &sys = device_.system();
	nlohmann::ordered_json payload;
	payload[dir] = event;
	sys.trace({sys.now(), path() + "/" + blocks_[fb]->name(), "event", std::move(payload)});
}

void Resource::sample_with(std::size_t fb, const std::string &event)
{
	auto &block = *blocks_[fb];
	const auto *port = block.interface().event_input(event);
	for (const auto &w : port->with) {
		auto it = data_links_.find({fb, w});
		if (it != data_links_.end())
			block.set_input(w, blocks_[it->second.fb]->output(it->second.port));
	}
}

void Resource::run_input(std::size_t fb, const std::string &event,
                         const std::vector<std::pair<std::string, DataValue>> &data)
{
	sample_with(fb, event);
	for (const auto &[port, value] : data)
		blocks_[fb]->set_input(port, value);
	trace_event(fb, "in", event);
	EventContext ctx(*this, fb);
	blocks_[fb]->on_event(event, ctx);
	drain_chain();
}

void Resource::run_internal(std::size_t fb, const std::string &tag, const std::vector<DataValue> &payload)
{
	trace_event(fb, "internal", tag);
	EventContext ctx(*this, fb);
	blocks_[fb]->on_internal(tag, payload, ctx);
	drain_chain();
}

void Resource::drain_chain()
{
	while (!chain_.empty() && running_) {
		auto next = std::move(chain_.front());
		chain_.pop_front();
		sample_with(next.fb, next.event);
		trace_event(next.fb, "in", next.event);
		EventContext ctx(*this, next.fb);
		blocks_[next.fb]->on_event(next.event, ctx);
	}
}

void Resource::emit_from(std::size_t fb, std::string_view event)
{
	if (!blocks_[fb]->interface().event_output(event))
		throw Error(path() + "/" + blocks_[fb]->name() + ": '" + std::string(event) + "' is not an output event");
	trace_event(fb, "out", event);
	auto it = event_links_.find({fb, std::string(event)});
	if (it == event_links_.end())
		return;
	for (const auto &target : it->second)
		chain_.push_back({target.fb, target.port});
}

// ---------------------------------------------------------------------------------------
// Device

Device::Device(SystemModel &system, std::string name, std::string address)
	: system_(system), name_(std::move(name)), address_(std::move(address))
{
}

Resource &Device::add_resource(std::string name)
{
	if (find_resource(name))
		throw Error(name_ + ": duplicate resource name '" + name + "'");
	resources_.push_back(std::make_unique<Resource>(*this, std::move(name)));
	return *resources_.back();
}

Resource *Device::find_resource(std::string_view name)
{
	for (auto &r : resources_)
		if (r->name() == name)
			return r.get();
	return nullptr;
}

std::string Device::resource_ld(std::string_view resource) const
{
	auto it = resource_ld_.find(resource);
	return it == resource_ld_.end() ? std::string {} : it->second;
}

// ---------------------------------------------------------------------------------------
// SystemModel

SystemModel::SystemModel() : topics_(std::make_unique<TopicBus>()) {}

SystemModel::~SystemModel() = default;

Device &SystemModel::add_device(std::string name, std::string address)
{
	if (find_device(name))
		throw Error("duplicate device name '" + name + "'");
	devices_.push_back(std::make_unique<Device>(*this, std::move(name), std::move(address)));
	return *devices_.back();
}

Device *SystemModel::find_device(std::string_view name)
{
	for (auto &d : devices_)
		if (d->name() == name)
			return d.get();
	return nullptr;
}

Resource *SystemModel::find_resource(std::string_view path)
{
	auto [dev, res] = split_path(path);
	auto *d = find_device(dev);
	return d ? d->find_resource(res) : nullptr;
}

Resource &SystemModel::resource(std::string_view path)
{
	if (auto *r = find_resource(path))
		return *r;
	throw Error("unknown resource '" + std::string(path) + "'");
}

void SystemModel::start()
{
	for (auto &d : devices_)
		for (auto &r : d->resources())
			r->start();
}

TimerId SystemModel::push(Item item)
{
	item.seq = next_seq_++;
	const auto seq = item.seq;
	heap_.push_back(std::move(item));
	std::push_heap(heap_.begin(), heap_.end(), [](const Item &a, const Item &b) { return later(a, b); });
	return seq;
}

TimerId SystemModel::dispatch_event(Resource &resource, std::string_view fb_instance, std::string_view event,
                                    VirtualTime at, std::vector<std::pair<std::string, DataValue>> data)
{
	if (!resource.running())
		throw ResourceStopped(resource.path() + ": resource not running");
	if (at < now_)
		throw Error(resource.path() + ": cannot dispatch into the past");

	const std::string prefix = std::string(fb_instance) + ".";
	auto targets = resource.resolve_event_input(prefix + std::string(event));

	// Map data named by the (possibly composite) instance's ports onto the leaf inputs.
	std::vector<std::vector<std::pair<std::string, DataValue>>> per_target(targets.size());
	for (auto &[port, value] : data) {
		bool used = false;
		for (const auto &leaf : resource.resolve_data_input(prefix + port)) {
			for (std::size_t i = 0; i < targets.size(); ++i) {
				if (targets[i].fb == leaf.fb) {
					per_target[i].emplace_back(leaf.port, value);
					used = true;
				}
			}
		}
		if (!used)
			throw Error(resource.path() + ": data '" + port + "' does not reach event " + std::string(event));
	}

	TimerId first = 0;
	for (std::size_t i = 0; i < targets.size(); ++i) {
		Item item;
		item.time = at;
		item.kind = Item::Kind::input;
		item.resource = &resource;
		item.fb = targets[i].fb;
		item.name = targets[i].port;
		item.data = std::move(per_target[i]);
		auto id = push(std::move(item));
		if (!first)
			first = id;
	}
	return first;
}

TimerId SystemModel::schedule_internal(Resource &resource, std::size_t fb, std::string tag, VirtualTime at,
                                       std::vector<DataValue> payload)
{
	Item item;
	item.time = std::max(at, now_);
	item.kind = Item::Kind::internal;
	item.resource = &resource;
	item.fb = fb;
	item.name = std::move(tag);
	item.payload = std::move(payload);
	return push(std::move(item));
}

TimerId SystemModel::schedule_task(VirtualTime at, std::string source, std::function<void()> task)
{
	Item item;
	item.time = std::max(at, now_);
	item.kind = Item::Kind::task;
	item.name = std::move(source);
	item.task = std::move(task);
	return push(std::move(item));
}

void SystemModel::cancel(TimerId id)
{
	auto it = std::find_if(heap_.begin(), heap_.end(), [&](const Item &i) { return i.seq == id; });
	if (it != heap_.end())
		cancelled_.insert(id);
}

std::optional<VirtualTime> SystemModel::next_event_time() const
{
	if (heap_.empty())
		return std::nullopt;
	return heap_.front().time;
}

void SystemModel::trace(TraceRecord record)
{
	if (collect_)
		collect_->push_back(record);
	if (sink_)
		sink_(record);
}

void SystemModel::drain_inbound()
{
	for (auto &item : inbound_.drain()) {
		if (auto *ev = std::get_if<InboundEvent>(&item)) {
			nlohmann::ordered_json payload;
			payload["target"] = ev->target;
			payload["origin"] = ev->origin;
			auto &data = payload["data"] = nlohmann::ordered_json::object();
			for (const auto &[k, v] : ev->data)
				data[k] = to_json(v);
			try {
				auto slash = ev->target.rfind('/');
				if (slash == std::string::npos)
					throw Error("inbound target '" + ev->target + "' is not DEVICE/RESOURCE/FB.EVENT");
				auto &res = resource(std::string_view(ev->target).substr(0, slash));
				auto [fb, event] = split_endpoint(std::string_view(ev->target).substr(slash + 1));
				auto at = std::max(now_, ev->arrival.value_or(now_));
				dispatch_event(res, fb, event, at, ev->data);
				trace({now_, ev->target, "inbound", std::move(payload)});
			} catch (const Error &e) {
				payload["error"] = e.what();
				trace({now_, ev->target, "drop", std::move(payload)});
			}
		} else {
			auto &task = std::get<InboundTask>(item);
			nlohmann::ordered_json payload;
			payload["origin"] = task.origin;
			trace({now_, task.origin, "inbound", std::move(payload)});
			task.run();
		}
	}
}

void SystemModel::execute(Item &item)
{
	switch (item.kind) {
	case Item::Kind::task:
		item.task();
		return;
	case Item::Kind::input:
	case Item::Kind::internal:
		if (!item.resource->running()) {
			nlohmann::ordered_json payload;
			payload["event"] = item.name;
			payload["reason"] = "resource not running";
			trace({now_, item.resource->path() + "/" + item.resource->at(item.fb).name(), "drop", std::move(payload)});
			return;
		}
		if (item.kind == Item::Kind::input)
			item.resource->run_input(item.fb, item.name, item.data);
		else
			item.resource->run_internal(item.fb, item.name, item.payload);
		return;
	}
}

std::vector<TraceRecord> SystemModel::step(VirtualTime until)
{
	if (until < now_)
		throw Error("step: 'until' lies before the current virtual time");

	std::vector<TraceRecord> records;
	collect_ = &records;
	struct Reset {
		std::vector<TraceRecord> *&slot;
		~Reset() { slot = nullptr; }
	} reset {collect_};

	drain_inbound();
	auto cmp = [](const Item &a, const Item &b) { return later(a, b); };
	while (!heap_.empty() && heap_.front().time <= until) {
		std::pop_heap(heap_.begin(), heap_.end(), cmp);
		Item item = std::move(heap_.back());
		heap_.pop_back();
		if (cancelled_.erase(item.seq))
			continue;
		now_ = item.time;
		execute(item);
	}
	now_ = until;
	return records;
}

} // namespace fbsas::fb

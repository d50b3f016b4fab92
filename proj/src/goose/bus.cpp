#include "fbsas/goose/bus.hpp"

#include "fbsas/fb/system.hpp"

namespace fbsas::goose {

namespace {

bool types_match(const std::vector<DataValue> &values, const std::vector<ValueType> &types)
{
	if (values.size() != types.size())
		return false;
	for (std::size_t i = 0; i < values.size(); ++i)
		if (type_of(values[i]) != types[i])
			return false;
	return true;
}

std::string describe(const std::vector<ValueType> &types)
{
	std::string s = "[";
	for (std::size_t i = 0; i < types.size(); ++i)
		s += (i ? "," : "") + type_name(types[i]);
	return s + "]";
}

} // namespace

void GooseBus::register_publisher(std::uint16_t app_id, std::string go_id, std::vector<ValueType> types)
{
	if (publishers_.contains(app_id))
		throw Error("app_id " + std::to_string(app_id) + " is already published on this bus");
	publishers_.emplace(app_id, Publisher {std::move(go_id), std::move(types)});
}

SubscriptionId GooseBus::subscribe(SubscriptionFilter filter, std::vector<ValueType> types, DeliveryHandler handler)
{
	if (auto it = publishers_.find(filter.app_id); it != publishers_.end() && it->second.types != types)
		throw TypeMismatch("subscription to app_id " + std::to_string(filter.app_id) + " expects " + describe(types) +
		                   " but the dataset carries " + describe(it->second.types));
	auto id = next_id_++;
	subs_.emplace(id, Subscription {std::move(filter), std::move(types), std::move(handler), {}});
	return id;
}

void GooseBus::unsubscribe(SubscriptionId id)
{
	subs_.erase(id);
}

std::size_t GooseBus::deliver(const GooseMessage &m)
{
	std::size_t n = 0;
	for (auto &[id, s] : subs_) {
		if (s.filter.app_id != m.app_id || (s.filter.go_id && *s.filter.go_id != m.go_id))
			continue;
		if (!types_match(m.all_data, s.types))
			continue;
		if (!s.seen.emplace(m.st_num, m.sq_num).second) {
			++duplicates_;
			continue;
		}
		// Bound the per-subscription memory.
		while (s.seen.size() > 4096)
			s.seen.erase(s.seen.begin());
		++n;
		s.handler(m);
	}
	return n;
}

InProcTransport::InProcTransport(fb::SystemModel &system, GooseBus &bus, VirtualTime latency)
	: system_(system), bus_(bus), latency_(latency)
{
}

void InProcTransport::send(const GooseMessage &m, VirtualTime at)
{
	system_.schedule_task(at + latency_, "goose", [this, m] { bus_.deliver(m); });
}

} // namespace fbsas::goose

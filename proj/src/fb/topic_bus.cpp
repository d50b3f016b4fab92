#include "fbsas/fb/topic_bus.hpp"

#include <algorithm>

#include "fbsas/fb/system.hpp"

namespace fbsas::fb {

void TopicBus::declare(const std::string &topic, const std::vector<ValueType> &types)
{
	auto [it, inserted] = types_.emplace(topic, types);
	if (!inserted && it->second != types)
		throw TypeMismatch("topic '" + topic + "' is already declared with different value types");
}

void TopicBus::subscribe(const std::string &topic, Resource &resource, std::size_t fb)
{
	auto &subs = subscribers_[topic];
	for (const auto &s : subs)
		if (s.resource == &resource && s.fb == fb)
			return;
	subs.push_back({&resource, fb});
}

void TopicBus::unsubscribe(const Resource &resource, std::size_t fb)
{
	for (auto &[topic, subs] : subscribers_)
		std::erase_if(subs, [&](const Subscriber &s) { return s.resource == &resource && s.fb == fb; });
}

void TopicBus::publish(SystemModel &system, const std::string &topic, std::vector<DataValue> values, VirtualTime at)
{
	if (auto it = types_.find(topic); it != types_.end()) {
		bool ok = it->second.size() == values.size();
		for (std::size_t i = 0; ok && i < values.size(); ++i)
			ok = type_of(values[i]) == it->second[i];
		if (!ok)
			throw TypeMismatch("publication on topic '" + topic + "' does not match its declared types");
	}
	auto it = subscribers_.find(topic);
	if (it == subscribers_.end())
		return;
	for (const auto &s : it->second)
		system.schedule_internal(*s.resource, s.fb, "RCV", at, values);
}

std::size_t TopicBus::subscriber_count(const std::string &topic) const
{
	auto it = subscribers_.find(topic);
	return it == subscribers_.end() ? 0 : it->second.size();
}

} // namespace fbsas::fb

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fbsas/core/time.hpp"
#include "fbsas/core/value.hpp"

namespace fbsas::fb {

class Resource;
class SystemModel;

/// In-process publish/subscribe channels used by PUBLISH/SUBSCRIBE blocks for traffic
/// that is not GOOSE (process-level samples, equipment commands). Delivery is a scheduled
/// internal event "RCV" on each subscriber, at the publication time.
class TopicBus {
public:
	/// Fixes the value types carried by a topic; a conflicting declaration throws.
	void declare(const std::string &topic, const std::vector<ValueType> &types);
	void subscribe(const std::string &topic, Resource &resource, std::size_t fb);
	void unsubscribe(const Resource &resource, std::size_t fb);
	void publish(SystemModel &system, const std::string &topic, std::vector<DataValue> values, VirtualTime at);

	std::size_t subscriber_count(const std::string &topic) const;

private:
	struct Subscriber {
		Resource *resource;
		std::size_t fb;
	};
	std::map<std::string, std::vector<ValueType>> types_;
	std::map<std::string, std::vector<Subscriber>> subscribers_;
};

} // namespace fbsas::fb

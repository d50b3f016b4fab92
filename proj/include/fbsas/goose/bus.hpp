#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fbsas/goose/message.hpp"

namespace fbsas::fb {
class SystemModel;
}

namespace fbsas::goose {

struct SubscriptionFilter {
	std::uint16_t app_id = 0;
	std::optional<std::string> go_id; ///< empty: any go_id with this app_id
};

using SubscriptionId = std::uint64_t;
using DeliveryHandler = std::function<void(const GooseMessage &)>;

/// Matches messages to subscriptions. Each subscription sees a given (st_num, sq_num) at
/// most once, whatever the transport does.
class GooseBus {
public:
	/// Declares a publisher's app_id and dataset types; app_ids are unique per bus.
	void register_publisher(std::uint16_t app_id, std::string go_id, std::vector<ValueType> types);

	/// Throws TypeMismatch when `types` disagrees with a registered publisher's dataset.
	SubscriptionId subscribe(SubscriptionFilter filter, std::vector<ValueType> types, DeliveryHandler handler);
	void unsubscribe(SubscriptionId id);

	/// Hands a received message to matching subscribers; returns the number of deliveries.
	std::size_t deliver(const GooseMessage &m);

	std::size_t duplicates_suppressed() const { return duplicates_; }
	std::size_t subscription_count() const { return subs_.size(); }

private:
	struct Subscription {
		SubscriptionFilter filter;
		std::vector<ValueType> types;
		DeliveryHandler handler;
		std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
	};
	struct Publisher {
		std::string go_id;
		std::vector<ValueType> types;
	};

	std::map<std::uint16_t, Publisher> publishers_;
	std::map<SubscriptionId, Subscription> subs_;
	SubscriptionId next_id_ = 1;
	std::size_t duplicates_ = 0;
};

/// Carries published messages to a bus.
class GooseTransport {
public:
	virtual ~GooseTransport() = default;
	virtual void send(const GooseMessage &m, VirtualTime at) = 0;
};

/// Deterministic delivery inside the scheduler: a task at `at + latency`.
class InProcTransport : public GooseTransport {
public:
	InProcTransport(fb::SystemModel &system, GooseBus &bus, VirtualTime latency = 0);
	void send(const GooseMessage &m, VirtualTime at) override;

private:
	fb::SystemModel &system_;
	GooseBus &bus_;
	VirtualTime latency_;
};

} // namespace fbsas::goose

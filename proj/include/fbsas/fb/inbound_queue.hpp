#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fbsas/core/time.hpp"
#include "fbsas/core/value.hpp"

namespace fbsas::fb {

/// A request from outside the scheduler thread to fire an input event.
/// `target` is "DEVICE/RESOURCE/FB.EVENT" (FB may name a composite instance).
struct InboundEvent {
	std::string target;
	std::vector<std::pair<std::string, DataValue>> data;
	std::string origin;
	std::optional<VirtualTime> arrival;
};

/// Arbitrary work to run on the scheduler thread (e.g. a received datagram).
struct InboundTask {
	std::string origin;
	std::function<void()> run;
};

using InboundItem = std::variant<InboundEvent, InboundTask>;

/// Thread-safe handoff to the scheduler; drained at virtual-time boundaries.
class InboundQueue {
public:
	void push(InboundItem item)
	{
		std::lock_guard lock(mutex_);
		items_.push_back(std::move(item));
	}

	std::vector<InboundItem> drain()
	{
		std::lock_guard lock(mutex_);
		std::vector<InboundItem> out;
		out.swap(items_);
		return out;
	}

private:
	std::mutex mutex_;
	std::vector<InboundItem> items_;
};

} // namespace fbsas::fb

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbsas/goose/message.hpp"
#include "fbsas/ln/model.hpp"

namespace fbsas::goose {

/// Retransmission intervals in milliseconds, ending in the steady-state heartbeat.
std::vector<std::uint32_t> default_schedule();

struct DataSetDef {
	std::string name;
	std::vector<ln::ObjectReference> members;
};

struct GcbConfig {
	std::string name;
	std::string go_id;
	std::uint16_t app_id = 0;
	DataSetDef dataset;
	std::uint32_t conf_rev = 1;
	std::vector<std::uint32_t> schedule = default_schedule();
};

/// Publisher-side state of one control block: numbering and retransmission timing.
/// Messages are built here; sending them is up to the caller.
class GooseControlBlock {
public:
	/// Throws on an empty dataset or an empty, non-positive or decreasing schedule.
	explicit GooseControlBlock(GcbConfig config);

	const GcbConfig &config() const { return config_; }

	/// Values of the dataset members in `model`. Throws ln::ResolveError.
	std::vector<DataValue> snapshot(const ln::DataModel &model) const;

	/// New state: st_num + 1, sq_num 0, t = at, data snapshotted from the model, schedule
	/// restarted.
	GooseMessage publish_change(const ln::DataModel &model, VirtualTime at);

	/// The retransmission due at or before `at`, if any: same st_num and t, sq_num + 1,
	/// TTL twice the next interval. At most one message per call.
	std::optional<GooseMessage> retransmit_tick(VirtualTime at);

	/// Time of the next retransmission; empty before the first change.
	std::optional<VirtualTime> next_due() const;
	const std::optional<GooseMessage> &last() const { return last_; }

private:
	GcbConfig config_;
	std::optional<GooseMessage> last_;
	std::size_t index_ = 0;
	VirtualTime next_due_ = 0;
};

} // namespace fbsas::goose

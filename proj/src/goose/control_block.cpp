#include "fbsas/goose/control_block.hpp"

#include <algorithm>

namespace fbsas::goose {

std::vector<std::uint32_t> default_schedule()
{
	return {4, 8, 16, 32, 64, 128, 256, 512, 1000};
}

GooseControlBlock::GooseControlBlock(GcbConfig config) : config_(std::move(config))
{
	if (config_.dataset.members.empty())
		throw Error(config_.name + ": dataset '" + config_.dataset.name + "' is empty");
	const auto &s = config_.schedule;
	if (s.empty() || s.front() == 0)
		throw Error(config_.name + ": retransmission schedule must start with a positive interval");
	if (!std::is_sorted(s.begin(), s.end()))
		throw Error(config_.name + ": retransmission schedule must be non-decreasing");
	if (config_.go_id.empty())
		config_.go_id = config_.name;
}

std::vector<DataValue> GooseControlBlock::snapshot(const ln::DataModel &model) const
{
	std::vector<DataValue> out;
	out.reserve(config_.dataset.members.size());
	for (const auto &m : config_.dataset.members)
		out.push_back(model.resolve(m).value);
	return out;
}

GooseMessage GooseControlBlock::publish_change(const ln::DataModel &model, VirtualTime at)
{
	GooseMessage m;
	m.app_id = config_.app_id;
	m.go_id = config_.go_id;
	m.st_num = last_ ? last_->st_num + 1 : 1;
	m.sq_num = 0;
	m.ttl_ms = 2 * config_.schedule.front();
	m.t = at;
	m.all_data = snapshot(model);
	index_ = 0;
	next_due_ = at + from_ms(config_.schedule.front());
	last_ = m;
	return m;
}

std::optional<GooseMessage> GooseControlBlock::retransmit_tick(VirtualTime at)
{
	if (!last_ || at < next_due_)
		return std::nullopt;
	index_ = std::min(index_ + 1, config_.schedule.size() - 1);
	next_due_ += from_ms(config_.schedule[index_]);
	last_->sq_num += 1;
	last_->ttl_ms = 2 * config_.schedule[index_];
	return last_;
}

std::optional<VirtualTime> GooseControlBlock::next_due() const
{
	if (!last_)
		return std::nullopt;
	return next_due_;
}

} // namespace fbsas::goose

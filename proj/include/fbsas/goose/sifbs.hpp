#pragma once

#include <optional>

#include "fbsas/fb/function_block.hpp"
#include "fbsas/goose/bus.hpp"
#include "fbsas/goose/control_block.hpp"

namespace fbsas::goose {

/// GOOSE_PUB: the control block as a service interface block in the LLN0 resource.
/// A change record on any dataset member schedules CHG at the same instant; CHG publishes
/// a new state when the dataset snapshot differs from the last published one, emits CNF,
/// and restarts the retransmission timer. REQ forces the same check.
class GoosePublisherBlock : public fb::FunctionBlock {
public:
	GoosePublisherBlock(std::string instance, GooseControlBlock &gcb, ln::DataModel &model, GooseTransport &transport);

	void on_event(std::string_view event, fb::EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue> payload, fb::EventContext &ctx) override;
	void on_start(fb::EventContext &ctx) override;
	void on_stop() override;

	const GooseControlBlock &control_block() const { return gcb_; }

private:
	void check_and_publish(fb::EventContext &ctx);
	void send(const GooseMessage &m, fb::EventContext &ctx);

	GooseControlBlock &gcb_;
	ln::DataModel &model_;
	GooseTransport &transport_;
	fb::Resource *resource_ = nullptr;
	std::size_t index_ = 0;
	bool listening_ = false;
	bool check_pending_ = false;
	std::optional<fb::TimerId> retransmit_;
};

/// GOOSE_SUB: emits IND with RD_1..RD_n whenever a message with a new state number
/// arrives. Retransmissions of a known state are traced but raise no event. The bus must
/// outlive the block.
class GooseSubscriberBlock : public fb::FunctionBlock {
public:
	GooseSubscriberBlock(std::string instance, GooseBus &bus, SubscriptionFilter filter, std::vector<ValueType> types);
	~GooseSubscriberBlock() override;

	void on_event(std::string_view, fb::EventContext &) override {}
	void on_internal(std::string_view tag, std::span<const DataValue> payload, fb::EventContext &ctx) override;
	void on_start(fb::EventContext &ctx) override;

private:
	void receive(const GooseMessage &m);

	GooseBus &bus_;
	SubscriptionFilter filter_;
	std::vector<ValueType> types_;
	std::optional<SubscriptionId> subscription_;
	fb::Resource *resource_ = nullptr;
	std::size_t index_ = 0;
	std::uint32_t last_st_ = 0;
};

} // namespace fbsas::goose

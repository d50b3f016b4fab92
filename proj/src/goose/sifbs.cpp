#include "fbsas/goose/sifbs.hpp"

#include <algorithm>

#include "fbsas/fb/system.hpp"

namespace fbsas::goose {

namespace {

fb::InterfaceDecl subscriber_interface(const std::vector<ValueType> &types)
{
	fb::InterfaceDecl iface;
	std::vector<std::string> names;
	for (std::size_t i = 0; i < types.size(); ++i) {
		names.push_back("RD_" + std::to_string(i + 1));
		iface.out_data(names.back(), default_value(types[i]));
	}
	iface.out_event("IND", names);
	return iface;
}

} // namespace

GoosePublisherBlock::GoosePublisherBlock(std::string instance, GooseControlBlock &gcb, ln::DataModel &model,
                                         GooseTransport &transport)
	: FunctionBlock(std::move(instance), "GOOSE_PUB", fb::InterfaceDecl().in_event("REQ").out_event("CNF")),
	  gcb_(gcb), model_(model), transport_(transport)
{
}

void GoosePublisherBlock::on_start(fb::EventContext &ctx)
{
	resource_ = &ctx.resource();
	index_ = ctx.index();
	if (listening_)
		return;
	listening_ = true;
	model_.add_listener([this](const ln::ChangeRecord &c) {
		if (!resource_->running() || check_pending_)
			return;
		const auto &members = gcb_.config().dataset.members;
		if (std::find(members.begin(), members.end(), c.ref) == members.end())
			return;
		check_pending_ = true;
		auto &sys = resource_->device().system();
		sys.schedule_internal(*resource_, index_, "CHG", sys.now());
	});
}

void GoosePublisherBlock::on_stop()
{
	check_pending_ = false;
	retransmit_.reset();
}

void GoosePublisherBlock::on_event(std::string_view, fb::EventContext &ctx)
{
	check_and_publish(ctx);
}

void GoosePublisherBlock::on_internal(std::string_view tag, std::span<const DataValue>, fb::EventContext &ctx)
{
	if (tag == "CHG") {
		check_pending_ = false;
		check_and_publish(ctx);
		return;
	}
	retransmit_.reset();
	if (auto m = gcb_.retransmit_tick(ctx.now())) {
		send(*m, ctx);
		retransmit_ = ctx.schedule("RTX", *gcb_.next_due() - ctx.now());
	}
}

void GoosePublisherBlock::check_and_publish(fb::EventContext &ctx)
{
	auto data = gcb_.snapshot(model_);
	if (gcb_.last() && gcb_.last()->all_data == data)
		return;
	auto m = gcb_.publish_change(model_, ctx.now());
	if (retransmit_)
		ctx.cancel(*retransmit_);
	send(m, ctx);
	retransmit_ = ctx.schedule("RTX", *gcb_.next_due() - ctx.now());
	ctx.emit("CNF");
}

void GoosePublisherBlock::send(const GooseMessage &m, fb::EventContext &ctx)
{
	ctx.system().trace({ctx.now(), ctx.resource().path() + "/" + name(), "goose_pub", to_json(m)});
	transport_.send(m, ctx.now());
}

GooseSubscriberBlock::GooseSubscriberBlock(std::string instance, GooseBus &bus, SubscriptionFilter filter,
                                           std::vector<ValueType> types)
	: FunctionBlock(std::move(instance), "GOOSE_SUB", subscriber_interface(types)), bus_(bus),
	  filter_(std::move(filter)), types_(std::move(types))
{
}

GooseSubscriberBlock::~GooseSubscriberBlock()
{
	if (subscription_)
		bus_.unsubscribe(*subscription_);
}

void GooseSubscriberBlock::on_start(fb::EventContext &ctx)
{
	resource_ = &ctx.resource();
	index_ = ctx.index();
	if (!subscription_)
		subscription_ = bus_.subscribe(filter_, types_, [this](const GooseMessage &m) { receive(m); });
}

void GooseSubscriberBlock::receive(const GooseMessage &m)
{
	auto &sys = resource_->device().system();
	const bool fresh = m.st_num > last_st_;
	nlohmann::ordered_json payload;
	payload["app_id"] = m.app_id;
	payload["go_id"] = m.go_id;
	payload["st_num"] = m.st_num;
	payload["sq_num"] = m.sq_num;
	payload["new_state"] = fresh && resource_->running();
	sys.trace({sys.now(), resource_->path() + "/" + name(), "goose_rx", std::move(payload)});
	if (!fresh || !resource_->running())
		return;
	last_st_ = m.st_num;
	sys.schedule_internal(*resource_, index_, "RX", sys.now(), m.all_data);
}

void GooseSubscriberBlock::on_internal(std::string_view, std::span<const DataValue> payload, fb::EventContext &ctx)
{
	for (std::size_t i = 0; i < payload.size(); ++i)
		set_output(iface_.data_outputs[i].name, payload[i]);
	ctx.emit("IND");
}

} // namespace fbsas::goose

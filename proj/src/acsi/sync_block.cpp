#include "fbsas/acsi/sync_block.hpp"

#include "fbsas/acsi/service.hpp"
#include "fbsas/fb/system.hpp"

namespace fbsas::acsi {

ServerSyncBlock::ServerSyncBlock(std::string instance, std::string ied, ln::DataModel &model, ServerBuffer &buffer,
                                 AcsiService *service)
	: FunctionBlock(std::move(instance), "SERVER_SYNC", fb::InterfaceDecl().in_event("REQ").out_event("CNF")),
	  ied_(std::move(ied)), model_(model), buffer_(buffer), service_(service)
{
}

void ServerSyncBlock::on_start(fb::EventContext &)
{
	if (listening_)
		return;
	listening_ = true;
	model_.add_listener([this](const ln::ChangeRecord &c) { pending_.push_back(c); });
}

void ServerSyncBlock::on_event(std::string_view, fb::EventContext &ctx)
{
	auto applied = buffer_.sync_cycle(pending_, ctx.now());
	const auto records = pending_.size();
	pending_.clear();
	if (service_)
		service_->publish(buffer_);
	nlohmann::ordered_json payload {{"ied", ied_}, {"records", records}, {"applied", applied}, {"cycle", buffer_.cycles()}};
	ctx.system().trace({ctx.now(), ctx.resource().path() + "/" + name(), "sync", std::move(payload)});
	ctx.emit("CNF");
}

} // namespace fbsas::acsi

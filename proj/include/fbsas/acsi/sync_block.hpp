#pragma once

#include <vector>

#include "fbsas/acsi/buffer.hpp"
#include "fbsas/fb/function_block.hpp"

namespace fbsas::acsi {

class AcsiService;

/// SERVER_SYNC: collects the IED model's change records and, on each REQ, folds them
/// into the server buffer, hands the buffer to the service (when there is one), traces a
/// "sync" record and emits CNF.
class ServerSyncBlock : public fb::FunctionBlock {
public:
	ServerSyncBlock(std::string instance, std::string ied, ln::DataModel &model, ServerBuffer &buffer,
	                AcsiService *service);

	void on_event(std::string_view event, fb::EventContext &ctx) override;
	void on_start(fb::EventContext &ctx) override;

	void attach(AcsiService *service) { service_ = service; }
	const std::string &ied() const { return ied_; }

private:
	std::string ied_;
	ln::DataModel &model_;
	ServerBuffer &buffer_;
	AcsiService *service_;
	std::vector<ln::ChangeRecord> pending_;
	bool listening_ = false;
};

} // namespace fbsas::acsi

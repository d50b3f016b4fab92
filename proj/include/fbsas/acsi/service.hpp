#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/acsi/buffer.hpp"
#include "fbsas/fb/inbound_queue.hpp"
#include "fbsas/scl/instantiate.hpp"

namespace fbsas::acsi {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 10261;

/// Where an accepted write goes: an inbound event target and the data input carrying
/// the value.
struct WriteRoute {
	std::string target; ///< "DEVICE/RESOURCE/FB.EVENT"
	std::string port;
};

/// Default routing: "<device>/<LN>/MFB.SET_<DO>" with the value on data input "<DO>".
WriteRoute default_route(std::string_view device, const ln::ObjectReference &ref);

/// Immutable view published after each sync cycle.
struct Snapshot {
	std::map<ln::ObjectReference, BufferEntry> entries;
	VirtualTime sync_t = 0;
	std::uint64_t cycles = 0;
};

/// Request handling for one IED server. Thread-safe: sessions call `handle` from any
/// thread; the scheduler thread calls `publish` after each sync cycle.
class AcsiService {
public:
	AcsiService(const scl::IedInstance &ied, std::string device, fb::InboundQueue &inbound);

	const std::string &ied() const { return ied_; }
	const std::string &device() const { return device_; }

	void publish(const ServerBuffer &buffer);
	std::shared_ptr<const Snapshot> snapshot() const;

	/// `session` identifies the caller in the inbound event origin.
	nlohmann::json handle(const nlohmann::json &request, std::uint64_t session);
	/// Parses the body first; malformed JSON yields BAD_REQUEST.
	nlohmann::json handle_text(std::string_view body, std::uint64_t session);

	void set_route(std::function<WriteRoute(const ln::ObjectReference &)> route) { route_ = std::move(route); }

	std::uint64_t accepted_writes() const { return accepted_writes_; }

private:
	nlohmann::json get(const nlohmann::json &req, const Snapshot &snap);
	nlohmann::json set(const nlohmann::json &req, const Snapshot &snap, std::uint64_t session);
	nlohmann::json dir(const nlohmann::json &req);

	std::string ied_;
	std::string device_;
	fb::InboundQueue &inbound_;
	std::set<ln::ObjectReference> writable_;
	/// Children one level down per scope: "" and the IED/device names list LDs,
	/// "LD" lists LNs, "LD/LN" lists data objects.
	std::map<std::string, std::set<std::string>, std::less<>> tree_;
	std::function<WriteRoute(const ln::ObjectReference &)> route_;

	mutable std::mutex mutex_;
	std::shared_ptr<const Snapshot> snapshot_;
	std::atomic<std::uint64_t> accepted_writes_ {0};
};

} // namespace fbsas::acsi

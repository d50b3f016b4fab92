#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "fbsas/core/trace.hpp"
#include "fbsas/fb/inbound_queue.hpp"

namespace fbsas::harness {

struct GatewayHooks {
	/// Latest state snapshot; null while the simulation is not running.
	std::function<std::shared_ptr<const nlohmann::ordered_json>()> state;
	std::function<bool()> running;
	fb::InboundQueue *inbound = nullptr;
	/// "DEVICE/RESOURCE/FB" of the feeder composite that receives operator commands.
	std::string feeder;
};

/// HTTP and WebSocket front end for an operator console:
///   GET  /state          latest snapshot
///   POST /load           {"amps": n}
///   POST /disconnector   {"state": "open" | "closed"}
///   POST /fault          {"amps": n} or {"clear": true}
///   GET  /events         WebSocket upgrade; one trace record per text frame
/// Commands are queued for the scheduler and answered with 202. Runs on its own thread.
class Gateway {
public:
	Gateway(GatewayHooks hooks, std::string address, std::uint16_t port);
	~Gateway();

	Gateway(const Gateway &) = delete;
	Gateway &operator=(const Gateway &) = delete;

	/// Port 0 picks an ephemeral port. Throws fbsas::Error when binding fails.
	void start();
	void stop();
	std::uint16_t port() const { return bound_port_; }

	/// Queues a record for every open /events socket. Callable from any thread.
	void broadcast(const TraceRecord &r);
	std::size_t event_clients() const { return clients_; }

	struct Reply {
		int status = 200;
		nlohmann::json body;
	};
	/// Request handling without the network, shared by the HTTP sessions.
	Reply handle(std::string_view method, std::string_view target, std::string_view body);

private:
	struct Impl;
	class HttpSession;
	class EventSession;
	void accept();

	GatewayHooks hooks_;
	std::string address_;
	std::uint16_t port_;
	std::uint16_t bound_port_ = 0;
	std::unique_ptr<Impl> impl_;
	std::thread thread_;
	std::atomic<std::size_t> clients_ {0};
};

} // namespace fbsas::harness

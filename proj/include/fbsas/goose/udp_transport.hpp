#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "fbsas/goose/bus.hpp"

namespace fbsas::goose {

struct UdpOptions {
	std::string group = "239.192.61.0";
	std::uint16_t port = 32850;
	std::string listen_address = "0.0.0.0";
	bool loopback = true;
};

/// Best-effort multicast transport. Received datagrams are decoded on the receive thread
/// and handed to the scheduler's inbound queue, which delivers them to the bus.
class UdpTransport : public GooseTransport {
public:
	UdpTransport(fb::SystemModel &system, GooseBus &bus, UdpOptions options = {});
	~UdpTransport() override;

	/// Opens the sockets and starts receiving. Throws fbsas::Error when the group cannot be joined.
	void start();
	void stop();

	void send(const GooseMessage &m, VirtualTime at) override;

	std::size_t sent() const { return sent_; }
	std::size_t received() const { return received_; }
	std::size_t decode_errors() const { return decode_errors_; }

private:
	struct Impl;
	void receive_loop();

	fb::SystemModel &system_;
	GooseBus &bus_;
	UdpOptions options_;
	std::unique_ptr<Impl> impl_;
	std::thread thread_;
	std::atomic<std::size_t> sent_ {0}, received_ {0}, decode_errors_ {0};
};

} // namespace fbsas::goose

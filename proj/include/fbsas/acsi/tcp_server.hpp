#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "fbsas/acsi/service.hpp"

namespace fbsas::acsi {

/// Largest accepted frame body; longer frames close the session.
inline constexpr std::uint32_t kMaxFrame = 1 << 20;

/// TCP listener for one service. Frames are a u32 big-endian length followed by a UTF-8
/// JSON body; each request frame gets exactly one response frame. Runs on its own thread.
class AcsiTcpServer {
public:
	AcsiTcpServer(AcsiService &service, std::string address, std::uint16_t port);
	~AcsiTcpServer();

	AcsiTcpServer(const AcsiTcpServer &) = delete;
	AcsiTcpServer &operator=(const AcsiTcpServer &) = delete;

	/// Binds and starts accepting. Port 0 picks an ephemeral port. Throws fbsas::Error.
	void start();
	void stop();

	std::uint16_t port() const { return bound_port_; }
	std::size_t sessions_opened() const { return sessions_; }

private:
	struct Impl;
	class Session;
	void accept();

	AcsiService &service_;
	std::string address_;
	std::uint16_t port_;
	std::uint16_t bound_port_ = 0;
	std::unique_ptr<Impl> impl_;
	std::thread thread_;
	std::atomic<std::size_t> sessions_ {0};
};

/// Blocking client, used by tests and tools.
class AcsiClient {
public:
	AcsiClient(const std::string &host, std::uint16_t port);
	~AcsiClient();

	nlohmann::json request(const nlohmann::json &req);
	/// Sends raw bytes as one frame body.
	nlohmann::json request_raw(std::string_view body);

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

std::string encode_frame(std::string_view body);

} // namespace fbsas::acsi

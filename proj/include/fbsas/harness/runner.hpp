#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "fbsas/harness/script.hpp"
#include "fbsas/harness/station.hpp"
#include "fbsas/harness/summary.hpp"

namespace fbsas::harness {

enum class Mode { fast, paced };

inline constexpr std::uint16_t kGatewayPort = 8061;

struct RunConfig {
	std::filesystem::path system;
	std::filesystem::path scl;
	std::optional<std::filesystem::path> script;
	Mode mode = Mode::fast;
	double pace = 1.0; ///< wall ms per virtual ms
	std::int64_t horizon_ms = 3000;
	Transport transport = Transport::inproc;
	std::string server_address = "127.0.0.1";
	std::uint16_t server_port = 10261; ///< IED i listens on server_port + i
	std::string gateway_address = "127.0.0.1";
	std::uint16_t gateway_port = kGatewayPort;
	std::optional<std::filesystem::path> trace_out;

	/// Throws Error on a non-positive horizon or pace.
	void validate() const;
};

/// Called at every tick boundary; returning false ends the run early.
using TickHook = std::function<bool(VirtualTime)>;

/// Starts the station if needed and plays the script up to `horizon`. Each step runs after
/// everything else scheduled at its time. With `tick` > 0 the run also stops at every
/// multiple of `tick` and calls `hook`. Steps past the horizon are not applied.
void run_script(Station &station, const Script &script, VirtualTime horizon, VirtualTime tick = 0,
                const TickHook &hook = {});

/// Sleeps so that virtual time tracks the wall clock scaled by `pace`; stops when `stop` is set.
TickHook pacer(double pace, const std::atomic<bool> &stop);

/// Loads the fixtures, runs the script in fast mode and writes the trace when asked.
RunSummary run(const RunConfig &config);

} // namespace fbsas::harness

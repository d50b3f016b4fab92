#include "fbsas/harness/runner.hpp"

#include <chrono>
#include <thread>

namespace fbsas::harness {

void RunConfig::validate() const
{
	if (horizon_ms <= 0)
		throw Error("horizon must be positive");
	if (!(pace > 0.0))
		throw Error("pace factor must be positive");
}

void run_script(Station &station, const Script &script, VirtualTime horizon, VirtualTime tick, const TickHook &hook)
{
	station.start();
	auto &sys = station.system();
	auto steps = script.steps.begin();
	auto next_tick = [&](VirtualTime now) { return tick > 0 ? (now / tick + 1) * tick : horizon; };

	while (sys.now() < horizon) {
		auto until = std::min(next_tick(sys.now()), horizon);
		if (steps != script.steps.end() && steps->at < until)
			until = std::max(steps->at, sys.now());
		station.advance(until);
		while (steps != script.steps.end() && steps->at <= sys.now()) {
			station.apply(*steps);
			++steps;
		}
		if (tick > 0 && until % tick == 0 && hook && !hook(until))
			return;
	}
	station.advance(horizon);
}

TickHook pacer(double pace, const std::atomic<bool> &stop)
{
	auto origin = std::make_shared<std::optional<std::chrono::steady_clock::time_point>>();
	return [origin, pace, &stop](VirtualTime t) {
		if (!*origin)
			*origin = std::chrono::steady_clock::now() - std::chrono::nanoseconds(static_cast<std::int64_t>(t * pace));
		std::this_thread::sleep_until(**origin + std::chrono::nanoseconds(static_cast<std::int64_t>(t * pace)));
		return !stop.load();
	};
}

RunSummary run(const RunConfig &config)
{
	config.validate();
	StationOptions options;
	options.transport = config.transport;
	auto station = Station::from_files(config.system, config.scl, options);
	Script script;
	if (config.script)
		script = load_script_file(*config.script);
	run_script(*station, script, from_ms(config.horizon_ms));
	if (config.trace_out)
		write_trace(*config.trace_out, station->trace());
	return summarize(station->trace());
}

} // namespace fbsas::harness

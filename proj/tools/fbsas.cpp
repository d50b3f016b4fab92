#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "fbsas/acsi/tcp_server.hpp"
#include "fbsas/harness/gateway.hpp"
#include "fbsas/harness/runner.hpp"

using namespace fbsas;
using namespace fbsas::harness;

namespace {

std::atomic<bool> g_stop {false};

void on_signal(int)
{
	g_stop = true;
}

void add_fixture_options(CLI::App &cmd, RunConfig &cfg)
{
	cmd.add_option("--system", cfg.system, "System description (JSON)")->required()->check(CLI::ExistingFile);
	cmd.add_option("--scl", cfg.scl, "Substation configuration (SCD)")->required()->check(CLI::ExistingFile);
}

void add_run_options(CLI::App &cmd, RunConfig &cfg, std::string &transport)
{
	add_fixture_options(cmd, cfg);
	cmd.add_option("--script", cfg.script, "Scenario script (JSON)")->check(CLI::ExistingFile);
	cmd.add_option("--horizon-ms", cfg.horizon_ms, "Virtual time to simulate");
	cmd.add_option("--transport", transport, "GOOSE transport")->check(CLI::IsMember({"inproc", "udp"}));
	cmd.add_option("--trace", cfg.trace_out, "Write the trace (JSON lines) here");
	cmd.add_option("--pace", cfg.pace, "Wall ms per virtual ms in paced mode");
}

int cmd_run(RunConfig cfg, const std::string &transport, bool paced)
{
	cfg.transport = transport == "udp" ? Transport::udp : Transport::inproc;
	cfg.mode = paced ? Mode::paced : Mode::fast;
	cfg.validate();
	Script script;
	if (cfg.script) {
		script = load_script_file(*cfg.script);
		if (script.horizon > 0 && cfg.horizon_ms == RunConfig {}.horizon_ms)
			cfg.horizon_ms = to_ms(script.horizon);
	}
	auto station = Station::from_files(cfg.system, cfg.scl, {cfg.transport, {}});
	if (paced)
		run_script(*station, script, from_ms(cfg.horizon_ms), from_ms(5), pacer(cfg.pace, g_stop));
	else
		run_script(*station, script, from_ms(cfg.horizon_ms));
	if (cfg.trace_out)
		write_trace(*cfg.trace_out, station->trace());
	std::cout << to_json(summarize(station->trace())).dump(2) << '\n';
	return 0;
}

int cmd_serve(RunConfig cfg, const std::string &transport)
{
	cfg.transport = transport == "udp" ? Transport::udp : Transport::inproc;
	cfg.mode = Mode::paced;
	cfg.validate();
	Script script;
	if (cfg.script)
		script = load_script_file(*cfg.script);
	auto station = Station::from_files(cfg.system, cfg.scl, {cfg.transport, {}});

	std::vector<std::unique_ptr<acsi::AcsiTcpServer>> servers;
	std::uint16_t port = cfg.server_port;
	for (const auto &ied : station->ied_names()) {
		auto &s = *servers.emplace_back(std::make_unique<acsi::AcsiTcpServer>(*station->service(ied), cfg.server_address, port++));
		s.start();
		std::cerr << "ied " << ied << " on " << cfg.server_address << ":" << s.port() << '\n';
	}

	std::atomic<bool> running {false};
	Gateway gateway({[&] { return station->latest_state(); }, [&] { return running.load(); },
	                 &station->system().inbound(), std::string(kPlantResource) + "/" + std::string(kFeeder)},
	                cfg.gateway_address, cfg.gateway_port);
	gateway.start();
	station->set_trace_listener([&](const TraceRecord &r) { gateway.broadcast(r); });
	std::cerr << "gateway on http://" << cfg.gateway_address << ":" << gateway.port() << '\n';

	station->start();
	running = true;
	run_script(*station, script, from_ms(cfg.horizon_ms), from_ms(5), pacer(cfg.pace, g_stop));
	running = false;

	gateway.stop();
	for (auto &s : servers)
		s->stop();
	if (cfg.trace_out)
		write_trace(*cfg.trace_out, station->trace());
	std::cout << to_json(summarize(station->trace())).dump(2) << '\n';
	return 0;
}

int cmd_validate(const RunConfig &cfg)
{
	auto station = Station::from_files(cfg.system, cfg.scl);
	const auto &report = station->validation();
	for (const auto &w : station->scl().warnings)
		std::cerr << "warning: " << w << '\n';
	std::cout << report.to_json_lines();
	std::cerr << report.findings.size() << " finding(s)\n";
	return report.consistent() ? 0 : 1;
}

int cmd_summarize(const std::string &path)
{
	std::cout << to_json(summarize(read_trace(path))).dump(2) << '\n';
	return 0;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app {"Function block substation automation simulator"};
	app.require_subcommand(1);

	RunConfig run_cfg;
	std::string run_transport = "inproc";
	bool paced = false;
	auto *run = app.add_subcommand("run", "Run a scenario and print its summary");
	add_run_options(*run, run_cfg, run_transport);
	run->add_flag("--paced", paced, "Track the wall clock instead of running as fast as possible");

	RunConfig serve_cfg;
	serve_cfg.horizon_ms = 24LL * 3600 * 1000;
	std::string serve_transport = "inproc";
	auto *serve = app.add_subcommand("serve", "Run paced with the operator gateway and IED servers");
	add_run_options(*serve, serve_cfg, serve_transport);
	serve->add_option("--server-address", serve_cfg.server_address, "IED server listen address");
	serve->add_option("--server-port", serve_cfg.server_port, "First IED server port");
	serve->add_option("--gateway-address", serve_cfg.gateway_address, "Gateway listen address");
	serve->add_option("--gateway-port", serve_cfg.gateway_port, "Gateway port");

	RunConfig val_cfg;
	auto *validate = app.add_subcommand("validate", "Check the SCL against the system description");
	add_fixture_options(*validate, val_cfg);

	std::string trace_path;
	auto *summarize_cmd = app.add_subcommand("trace-summarize", "Summarize a trace file");
	summarize_cmd->add_option("trace", trace_path, "Trace file (JSON lines)")->required()->check(CLI::ExistingFile);

	CLI11_PARSE(app, argc, argv);

	std::signal(SIGINT, on_signal);
	std::signal(SIGTERM, on_signal);
	try {
		if (*run)
			return cmd_run(run_cfg, run_transport, paced);
		if (*serve)
			return cmd_serve(serve_cfg, serve_transport);
		if (*validate)
			return cmd_validate(val_cfg);
		return cmd_summarize(trace_path);
	} catch (const FixtureError &e) {
		std::cerr << "fixture error: " << e.what() << '\n';
		return 2;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
}

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

#include "fbsas/acsi/tcp_server.hpp"
#include "fbsas/harness/gateway.hpp"
#include "fbsas/harness/runner.hpp"
#include "support/trace_timeline.hpp"

using namespace fbsas;
using namespace fbsas::harness;

namespace {

const std::string kDir = FBSAS_FIXTURE_DIR;

std::unique_ptr<Station> make_station()
{
	return Station::from_files(kDir + "/system.json", kDir + "/station.scd");
}

Script persistent()
{
	return load_script_file(kDir + "/scripts/persistent_fault.json");
}

std::vector<std::string> lines(const std::vector<TraceRecord> &trace)
{
	std::vector<std::string> out;
	for (const auto &r : trace)
		out.push_back(to_json_line(r));
	return out;
}

std::filesystem::path temp_path(const std::string &name)
{
	return std::filesystem::temp_directory_path() / ("fbsas_" + std::to_string(::getpid()) + "_" + name);
}

std::string read_file(const std::filesystem::path &p)
{
	std::ifstream in(p, std::ios::binary);
	return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("script parsing")
{
	auto s = script_from_json(nlohmann::json::parse(R"({"name": "x", "horizon_ms": 100, "steps": [
		{"at_ms": 50, "action": "clear_fault"},
		{"at_ms": 10, "action": "set_fault", "amps": 900},
		{"at_ms": 50, "action": "open_disc"}]})"));
	REQUIRE(s.steps.size() == 3);
	CHECK(s.horizon == from_ms(100));
	CHECK(s.steps[0].action == ScriptAction::set_fault);
	CHECK(s.steps[1].action == ScriptAction::clear_fault);
	CHECK(s.steps[2].action == ScriptAction::open_disc);

	CHECK_THROWS_AS(script_from_json(nlohmann::json::parse(R"({"steps": [{"at_ms": 1, "action": "explode"}]})")),
	                ScriptError);
	CHECK_THROWS_AS(script_from_json(nlohmann::json::parse(R"({"steps": [{"at_ms": -1, "action": "clear_fault"}]})")),
	                ScriptError);
	CHECK_THROWS_AS(script_from_json(nlohmann::json::parse(R"({"steps": [{"at_ms": 1, "action": "set_load"}]})")),
	                ScriptError);
	CHECK_THROWS_AS(script_from_json(nlohmann::json::parse(R"({"horizon_ms": 0})")), ScriptError);
}

TEST_CASE("run config validation")
{
	RunConfig c;
	CHECK_NOTHROW(c.validate());
	c.horizon_ms = 0;
	CHECK_THROWS(c.validate());
	c.horizon_ms = 10;
	c.pace = 0;
	CHECK_THROWS(c.validate());
}

TEST_CASE("fresh station state")
{
	auto st = make_station();
	CHECK(st->validation().consistent());
	CHECK(st->latest_state() == nullptr);
	st->start();
	auto state = st->latest_state();
	REQUIRE(state);
	CHECK((*state)["feeder"]["breaker_pos"] == "on");
	CHECK((*state)["feeder"]["load_setpoint"] == 0.0);
	CHECK((*state)["feeder"]["recloser"]["shot_count"] == 0);
	CHECK((*state)["lns"]["BRK"]["BRKLD0/XCBR1.Pos.stVal"]["v"] == "on");
	CHECK(st->ied_names() == std::vector<std::string> {"CT", "PROT", "REC", "BRK"});
}

TEST_CASE("fast runs are byte-identical")
{
	auto a = temp_path("a.jsonl"), b = temp_path("b.jsonl");
	RunConfig c;
	c.system = kDir + "/system.json";
	c.scl = kDir + "/station.scd";
	c.script = kDir + "/scripts/persistent_fault.json";
	c.horizon_ms = 4000;
	c.trace_out = a;
	auto sa = run(c);
	c.trace_out = b;
	auto sb = run(c);
	CHECK(sa == sb);
	auto ta = read_file(a);
	CHECK(!ta.empty());
	CHECK(ta == read_file(b));

	SUBCASE("summary recomputes from the trace file")
	{
		CHECK(summarize(read_trace(a)) == sa);
		CHECK(sa.trips == 4);
		CHECK(sa.recloses == 3);
		CHECK(sa.sync_cycles == 4 * 400);
		CHECK(sa.goose_published > 0);
		CHECK(sa.goose_delivered > 0);
	}
	std::filesystem::remove(a);
	std::filesystem::remove(b);
}

TEST_CASE("fixture errors surface before any step")
{
	SUBCASE("SCL declares a node the system lacks")
	{
		auto doc = scl::parse_scl_file(kDir + "/station.scd");
		doc.ieds[1].access_points[0].ldevices[0].lns.push_back({"", "PTOC", "7", "PTOC_T", {}});
		std::ifstream in(kDir + "/system.json");
		Station st(doc, nlohmann::json::parse(in));
		CHECK(st.validation().count("missing_in_model") == 1);
		CHECK_THROWS_AS(st.start(), FixtureError);
		CHECK(st.trace().empty());
		CHECK(st.system().now() == 0);
	}
	SUBCASE("system uses a node the SCL lacks")
	{
		auto doc = scl::parse_scl_file(kDir + "/station.scd");
		auto &lns = doc.ieds[1].access_points[0].ldevices[0].lns;
		auto it = std::find_if(lns.begin(), lns.end(), [](const scl::SclLn &ln) { return ln.ln_class == "PTOC"; });
		REQUIRE(it != lns.end());
		lns.erase(it);
		std::ifstream in(kDir + "/system.json");
		Station st(doc, nlohmann::json::parse(in));
		CHECK(st.validation().findings.size() == 1);
		CHECK(st.validation().count("undeclared_in_scl") == 1);
		CHECK_THROWS_AS(st.start(), FixtureError);
		CHECK(st.trace().empty());
	}
	SUBCASE("SCL dataset names a removed node")
	{
		auto doc = scl::parse_scl_file(kDir + "/station.scd");
		auto &lns = doc.ieds[1].access_points[0].ldevices[0].lns;
		auto it = std::find_if(lns.begin(), lns.end(), [](const scl::SclLn &ln) { return ln.ln_class == "PTRC"; });
		REQUIRE(it != lns.end());
		lns.erase(it);
		std::ifstream in(kDir + "/system.json");
		CHECK_THROWS_AS(Station(doc, nlohmann::json::parse(in)), FixtureError);
	}
	SUBCASE("broken system description")
	{
		auto doc = scl::parse_scl_file(kDir + "/station.scd");
		std::ifstream in(kDir + "/system.json");
		auto sys = nlohmann::json::parse(in);
		sys["devices"][1]["resources"][1]["fbs"][1]["type"] = "NO_SUCH_TYPE";
		CHECK_THROWS_AS(Station(doc, sys), FixtureError);
	}
	SUBCASE("missing files")
	{
		CHECK_THROWS_AS(Station::from_files(kDir + "/missing.json", kDir + "/station.scd"), FixtureError);
		CHECK_THROWS_AS(Station::from_files(kDir + "/system.json", kDir + "/missing.scd"), FixtureError);
	}
}

TEST_CASE("GOOSE numbering in the persistent-fault trace")
{
	auto st = make_station();
	run_script(*st, persistent(), from_ms(4000));
	const auto schedule = goose::default_schedule();

	struct Track {
		std::uint32_t st = 0, sq = 0;
		VirtualTime change = 0, last = 0;
		int changes = 0;
	};
	std::map<std::string, Track> tracks;
	for (const auto &r : st->trace()) {
		if (r.kind != "goose_pub")
			continue;
		auto go = r.payload.at("go_id").get<std::string>();
		auto stn = r.payload.at("st_num").get<std::uint32_t>();
		auto sq = r.payload.at("sq_num").get<std::uint32_t>();
		auto &t = tracks[go];
		CAPTURE(go);
		CAPTURE(to_ms(r.time));
		if (sq == 0) {
			CHECK(stn == t.st + 1);
			t.st = stn;
			t.sq = 0;
			t.change = t.last = r.time;
			++t.changes;
		} else {
			CHECK(stn == t.st);
			CHECK(sq == t.sq + 1);
			const auto idx = std::min<std::size_t>(sq - 1, schedule.size() - 1);
			CHECK(r.time - t.last == from_ms(schedule[idx]));
			t.sq = sq;
			t.last = r.time;
		}
	}
	CHECK(tracks["TripGo"].changes == 8);
	CHECK(tracks["PosGo"].changes == 14);
	CHECK(tracks["RecGo"].changes == 7);
}

TEST_CASE("ACSI polling stays consistent with the trace")
{
	auto st = make_station();
	acsi::AcsiTcpServer server(*st->service("BRK"), "127.0.0.1", 0);
	server.start();
	acsi::AcsiClient client("127.0.0.1", server.port());

	struct Poll {
		VirtualTime sync_t;
		std::string value;
	};
	std::vector<Poll> polls;
	run_script(*st, persistent(), from_ms(4000), from_ms(1), [&](VirtualTime) {
		auto reply = client.request({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}, {"id", polls.size()}});
		REQUIRE(reply["ok"] == true);
		polls.push_back({reply["sync_t"].get<VirtualTime>(), reply["value"]["v"].get<std::string>()});
		return true;
	});
	server.stop();

	// position as of each BRK sync record, from the changes traced before it
	std::map<VirtualTime, std::string> at_sync;
	std::string pos = "on";
	for (const auto &r : st->trace()) {
		if (r.kind == "change" && r.payload["ref"] == "BRKLD0/XCBR1.Pos.stVal")
			pos = r.payload["new"]["v"].get<std::string>();
		else if (r.kind == "sync" && r.payload["ied"] == "BRK")
			at_sync[r.time] = pos;
	}
	int contradictions = 0;
	std::vector<std::string> seen;
	for (const auto &p : polls) {
		if (p.sync_t > 0 && at_sync.at(p.sync_t) != p.value)
			++contradictions;
		if (seen.empty() || seen.back() != p.value)
			seen.push_back(p.value);
	}
	CHECK(contradictions == 0);
	const std::vector<std::string> expected {"on", "intermediate", "off", "intermediate", "on", "intermediate", "off",
	                                         "intermediate", "on", "intermediate", "off", "intermediate", "on",
	                                         "intermediate", "off"};
	CHECK(seen == expected);
}

TEST_CASE("paced run matches the fast trace")
{
	auto fast = make_station();
	Script s = load_script_file(kDir + "/scripts/transient_fault.json");
	run_script(*fast, s, from_ms(800));

	auto paced = make_station();
	std::atomic<bool> stop {false};
	run_script(*paced, s, from_ms(800), from_ms(5), pacer(0.05, stop));
	CHECK(lines(fast->trace()) == lines(paced->trace()));
}

TEST_CASE("gateway request handling")
{
	fb::InboundQueue queue;
	bool running = false;
	auto state = std::make_shared<const nlohmann::ordered_json>(nlohmann::ordered_json {{"t_ms", 5}});
	Gateway gw({[&] { return running ? state : nullptr; }, [&] { return running; }, &queue, "DISPLAY/PLANT/FEEDER"},
	           "127.0.0.1", 0);

	CHECK(gw.handle("GET", "/state", "").status == 503);
	CHECK(gw.handle("POST", "/load", R"({"amps": 10})").status == 503);
	CHECK(queue.drain().empty());
	running = true;

	auto r = gw.handle("GET", "/state?x=1", "");
	CHECK(r.status == 200);
	CHECK(r.body["t_ms"] == 5);
	CHECK(gw.handle("POST", "/state", "").status == 405);
	CHECK(gw.handle("GET", "/load", "").status == 405);
	CHECK(gw.handle("GET", "/nothing", "").status == 404);
	CHECK(gw.handle("POST", "/load", "{").status == 400);
	CHECK(gw.handle("POST", "/load", R"({"amps": -1})").status == 400);
	CHECK(gw.handle("POST", "/load", R"({"amps": "9"})").status == 400);
	CHECK(gw.handle("POST", "/disconnector", R"({"state": "ajar"})").status == 400);
	CHECK(gw.handle("POST", "/fault", R"({})").status == 400);
	CHECK(queue.drain().empty());

	CHECK(gw.handle("POST", "/load", R"({"amps": 800})").status == 202);
	CHECK(gw.handle("POST", "/disconnector", R"({"state": "open"})").status == 202);
	CHECK(gw.handle("POST", "/fault", R"({"amps": 1200})").status == 202);
	CHECK(gw.handle("POST", "/fault", R"({"clear": true})").status == 202);
	auto items = queue.drain();
	REQUIRE(items.size() == 4);
	auto target = [&](std::size_t i) { return std::get<fb::InboundEvent>(items[i]).target; };
	CHECK(target(0) == "DISPLAY/PLANT/FEEDER.SET_LOAD");
	CHECK(std::get<fb::InboundEvent>(items[0]).data.at(0).second == DataValue {800.0});
	CHECK(target(1) == "DISPLAY/PLANT/FEEDER.OPEN_DISC");
	CHECK(target(2) == "DISPLAY/PLANT/FEEDER.SET_FAULT");
	CHECK(target(3) == "DISPLAY/PLANT/FEEDER.CLEAR_FAULT");
}

TEST_CASE("gateway end to end: load above pickup trips the breaker")
{
	auto st = make_station();
	std::atomic<bool> stop {false};
	std::atomic<bool> running {false};
	Gateway gw({[&] { return st->latest_state(); }, [&] { return running.load(); }, &st->system().inbound(),
	            std::string(kPlantResource) + "/" + std::string(kFeeder)},
	           "127.0.0.1", 0);
	gw.start();
	st->set_trace_listener([&](const TraceRecord &r) { gw.broadcast(r); });

	namespace beast = boost::beast;
	boost::asio::io_context io;
	beast::websocket::stream<boost::asio::ip::tcp::socket> ws(io);
	boost::asio::ip::tcp::resolver resolver(io);
	boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(gw.port())));
	ws.handshake("127.0.0.1", "/events");
	for (int i = 0; i < 200 && gw.event_clients() == 0; ++i)
		std::this_thread::sleep_for(std::chrono::milliseconds(5));
	REQUIRE(gw.event_clients() == 1);

	httplib::Client http("127.0.0.1", gw.port());
	CHECK(http.Get("/state")->status == 503);

	std::thread sim([&] {
		st->start();
		running = true;
		run_script(*st, Script {}, from_ms(1'000'000), from_ms(5), pacer(0.2, stop));
		running = false;
	});
	for (int i = 0; i < 500 && !running; ++i)
		std::this_thread::sleep_for(std::chrono::milliseconds(2));

	auto fresh = http.Get("/state");
	REQUIRE(fresh);
	CHECK(fresh->status == 200);
	auto j = nlohmann::json::parse(fresh->body);
	CHECK(j["feeder"]["breaker_pos"] == "on");
	CHECK(j["feeder"]["load_setpoint"] == 0.0);

	auto post = http.Post("/load", R"({"amps": 800})", "application/json");
	REQUIRE(post);
	CHECK(post->status == 202);
	CHECK(http.Post("/load", "nope", "application/json")->status == 400);

	std::string pos;
	double load = 0;
	for (int i = 0; i < 400; ++i) {
		auto res = http.Get("/state");
		auto s = nlohmann::json::parse(res->body);
		pos = s["feeder"]["breaker_pos"].get<std::string>();
		load = s["feeder"]["load_setpoint"].get<double>();
		if (pos == "off")
			break;
		std::this_thread::sleep_for(std::chrono::milliseconds(5));
	}
	CHECK(load == 800.0);
	CHECK(pos == "off");

	beast::flat_buffer buf;
	ws.read(buf);
	auto frame = beast::buffers_to_string(buf.data());
	auto rec = trace_from_json_line(frame);
	CHECK(!rec.kind.empty());

	stop = true;
	sim.join();
	beast::error_code ec;
	ws.next_layer().close(ec);
	gw.stop();
}

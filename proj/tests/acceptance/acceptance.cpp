// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero when any
// criterion fails.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/mman.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fbsas/acsi/tcp_server.hpp"
#include "fbsas/harness/runner.hpp"
#include "support/feeder_oracle.hpp"
#include "support/goose_gen.hpp"
#include "support/trace_timeline.hpp"

using namespace fbsas;
using namespace fbsas::harness;

namespace {

const std::string kDir = FBSAS_FIXTURE_DIR;

struct Verdict {
	bool pass = true;
	std::string detail;
};

std::unique_ptr<Station> make_station(const nlohmann::json *system = nullptr, const scl::SclDocument *doc = nullptr)
{
	if (!system && !doc)
		return Station::from_files(kDir + "/system.json", kDir + "/station.scd");
	std::ifstream in(kDir + "/system.json");
	auto sys = system ? *system : nlohmann::json::parse(in);
	return std::make_unique<Station>(doc ? *doc : scl::parse_scl_file(kDir + "/station.scd"), sys);
}

Script fixture_script(const char *name)
{
	return load_script_file(kDir + "/scripts/" + name + ".json");
}

oracle::Result oracle_for(const Script &s, std::int64_t horizon_ms)
{
	std::vector<oracle::Action> actions;
	for (const auto &st : s.steps) {
		oracle::Kind k = oracle::Kind::set_load;
		switch (st.action) {
		case ScriptAction::set_load: k = oracle::Kind::set_load; break;
		case ScriptAction::set_fault: k = oracle::Kind::set_fault; break;
		case ScriptAction::clear_fault: k = oracle::Kind::clear_fault; break;
		case ScriptAction::open_disc: k = oracle::Kind::open_disc; break;
		case ScriptAction::close_disc: k = oracle::Kind::close_disc; break;
		}
		actions.push_back({to_ms(st.at), k, st.amps});
	}
	return oracle::simulate({}, actions, horizon_ms);
}

std::string describe(const oracle::Point &p)
{
	return p.pos + "/shot " + std::to_string(p.shot) + (p.locked_out ? "/locked" : "");
}

/// Station run compared with the oracle timeline at 1 ms resolution.
Verdict timeline_match(const Script &s, std::int64_t horizon_ms, std::vector<TraceRecord> *trace_out = nullptr)
{
	auto st = make_station();
	run_script(*st, s, from_ms(horizon_ms));
	auto got = support::timeline_from_trace(st->trace(), horizon_ms);
	auto want = oracle_for(s, horizon_ms);
	auto sum = summarize(st->trace());
	if (trace_out)
		*trace_out = st->trace();
	Verdict v;
	auto at = support::first_divergence(got, want.timeline);
	if (at >= 0) {
		v.pass = false;
		v.detail = "diverges at " + std::to_string(at) + " ms: station " + describe(got.at(at)) + ", oracle " +
		           describe(want.timeline.at(at));
		return v;
	}
	if (sum.trips != want.trips || sum.recloses != want.recloses) {
		v.pass = false;
		v.detail = "counts differ: station " + std::to_string(sum.trips) + "/" + std::to_string(sum.recloses) +
		           ", oracle " + std::to_string(want.trips) + "/" + std::to_string(want.recloses);
		return v;
	}
	v.detail = std::to_string(got.size()) + " ms match the oracle; trips " + std::to_string(sum.trips) + ", recloses " +
	           std::to_string(sum.recloses);
	return v;
}

Verdict criterion_1()
{
	std::vector<TraceRecord> trace;
	auto v = timeline_match(fixture_script("persistent_fault"), 4000, &trace);
	auto sum = summarize(trace);
	bool blk = false;
	for (const auto &r : trace)
		if (r.kind == "change" && r.payload["ref"] == "RECLD0/RREC1.BlkRec.stVal")
			blk = r.payload["new"]["v"].get<bool>();
	if (sum.recloses != 3 || !sum.locked_out || sum.final_breaker_pos != "off" || !blk) {
		v.pass = false;
		v.detail += "; expected 3 recloses, lockout, breaker off, BlkRec true";
	} else {
		v.detail += "; locked out with breaker off and BlkRec true";
	}
	return v;
}

Verdict criterion_2()
{
	std::vector<TraceRecord> trace;
	auto v = timeline_match(fixture_script("transient_fault"), 4000, &trace);
	auto tl = support::timeline_from_trace(trace, 4000);
	// reclose at 700 ms starts the reclaim time
	const auto reclaim_end = 700 + power::RecloserSettings {}.reclaim_time_ms;
	const bool ok = tl.back().pos == "on" && !tl.back().locked_out && tl.at(reclaim_end - 1).shot == 1 &&
	                tl.at(reclaim_end).shot == 0;
	if (!ok) {
		v.pass = false;
		v.detail += "; expected breaker on, shot 1 -> 0 at " + std::to_string(reclaim_end) + " ms, no lockout";
	} else {
		v.detail += "; breaker on, shot counter back to 0 at " + std::to_string(reclaim_end) + " ms";
	}
	return v;
}

Verdict criterion_3()
{
	const auto schedule = goose::default_schedule();
	const VirtualTime tolerance = from_ms(1);
	std::size_t messages = 0, changes = 0;
	for (const char *name : {"persistent_fault", "transient_fault", "no_fault"}) {
		auto st = make_station();
		run_script(*st, fixture_script(name), from_ms(6000));
		struct Track {
			std::uint32_t st = 0, sq = 0;
			VirtualTime last = 0;
		};
		std::map<std::string, Track> tracks;
		for (const auto &r : st->trace()) {
			if (r.kind != "goose_pub")
				continue;
			++messages;
			auto go = r.payload["go_id"].get<std::string>();
			auto stn = r.payload["st_num"].get<std::uint32_t>();
			auto sq = r.payload["sq_num"].get<std::uint32_t>();
			auto &t = tracks[go];
			auto fail = [&](const std::string &what) {
				return Verdict {false, std::string(name) + " " + go + " at " + std::to_string(to_ms(r.time)) + " ms: " + what};
			};
			if (sq == 0) {
				++changes;
				if (stn <= t.st)
					return fail("st_num not increasing");
			} else {
				if (stn != t.st)
					return fail("st_num changed without sq_num 0");
				if (sq != t.sq + 1)
					return fail("sq_num not consecutive");
				auto want = from_ms(schedule[std::min<std::size_t>(sq - 1, schedule.size() - 1)]);
				if (std::llabs(r.time - t.last - want) > tolerance)
					return fail("retransmission off schedule");
			}
			t.st = stn;
			t.sq = sq;
			t.last = r.time;
		}
	}
	if (changes == 0)
		return {false, "no GOOSE traffic"};
	return {true, std::to_string(messages) + " messages, " + std::to_string(changes) + " state changes checked"};
}

/// Decodes `bytes` from a copy that ends right before an inaccessible page.
class GuardedBuffer {
public:
	GuardedBuffer()
	{
		page_ = static_cast<std::size_t>(sysconf(_SC_PAGESIZE));
		size_ = 16 * page_;
		base_ = static_cast<std::uint8_t *>(mmap(nullptr, size_ + page_, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS, -1, 0));
		if (base_ == MAP_FAILED)
			throw std::runtime_error("mmap failed");
		mprotect(base_ + size_, page_, PROT_NONE);
	}
	~GuardedBuffer() { munmap(base_, size_ + page_); }

	std::span<const std::uint8_t> place(const std::vector<std::uint8_t> &bytes)
	{
		if (bytes.size() > size_)
			throw std::runtime_error("buffer too large");
		auto *start = base_ + size_ - bytes.size();
		std::copy(bytes.begin(), bytes.end(), start);
		return {start, bytes.size()};
	}

private:
	std::uint8_t *base_ = nullptr;
	std::size_t size_ = 0;
	std::size_t page_ = 0;
};

Verdict criterion_4()
{
	std::mt19937_64 rng(4);
	GuardedBuffer guard;
	int round_trips = 0, decoded = 0, diagnosed = 0;
	for (int i = 0; i < 10000; ++i) {
		auto m = testgen::random_message(rng);
		auto bytes = goose::encode(m);
		if (goose::decode(guard.place(bytes)) == m)
			++round_trips;
	}
	for (int i = 0; i < 10000; ++i) {
		auto bytes = goose::encode(testgen::random_message(rng));
		testgen::mutate(bytes, rng);
		try {
			goose::decode(guard.place(bytes));
			++decoded;
		} catch (const goose::CodecError &) {
			++diagnosed;
		} catch (const std::exception &e) {
			return {false, std::string("unexpected exception: ") + e.what()};
		}
	}
	if (round_trips != 10000)
		return {false, std::to_string(round_trips) + "/10000 round trips equal"};
	return {true, "10000/10000 round trips; 10000 mutated buffers: " + std::to_string(decoded) + " decoded, " +
	                  std::to_string(diagnosed) + " diagnosed, none read past the end"};
}

Verdict criterion_5()
{
	auto dir = std::filesystem::temp_directory_path();
	auto a = dir / ("fbsas_accept_" + std::to_string(getpid()) + "_a.jsonl");
	auto b = dir / ("fbsas_accept_" + std::to_string(getpid()) + "_b.jsonl");
	RunConfig c;
	c.system = kDir + "/system.json";
	c.scl = kDir + "/station.scd";
	c.script = kDir + "/scripts/persistent_fault.json";
	c.horizon_ms = 4000;
	c.trace_out = a;
	run(c);
	c.trace_out = b;
	run(c);
	auto slurp = [](const std::filesystem::path &p) {
		std::ifstream in(p, std::ios::binary);
		return std::string(std::istreambuf_iterator<char>(in), {});
	};
	auto ta = slurp(a), tb = slurp(b);
	std::filesystem::remove(a);
	std::filesystem::remove(b);
	if (ta.empty() || ta != tb)
		return {false, "trace files differ"};
	return {true, "two runs, " + std::to_string(ta.size()) + " identical bytes"};
}

Verdict criterion_6()
{
	const std::string ref = "BRKLD0/XCBR1.Pos.stVal";
	auto st = make_station();
	acsi::AcsiTcpServer server(*st->service("BRK"), "127.0.0.1", 0);
	server.start();
	acsi::AcsiClient client("127.0.0.1", server.port());
	struct Poll {
		VirtualTime sync_t;
		std::string value;
	};
	std::vector<Poll> polls;
	std::string error;
	run_script(*st, fixture_script("persistent_fault"), from_ms(4000), from_ms(1), [&](VirtualTime) {
		auto reply = client.request({{"op", "get"}, {"ref", ref}});
		if (reply["ok"] != true) {
			error = reply.dump();
			return false;
		}
		polls.push_back({reply["sync_t"].get<VirtualTime>(), reply["value"]["v"].get<std::string>()});
		return true;
	});
	server.stop();
	if (!error.empty())
		return {false, "get failed: " + error};

	std::map<VirtualTime, std::string> at_sync;
	std::string pos = "on";
	for (const auto &r : st->trace()) {
		if (r.kind == "init" && r.payload["values"].contains(ref))
			pos = r.payload["values"][ref]["v"].get<std::string>();
		else if (r.kind == "change" && r.payload["ref"] == ref)
			pos = r.payload["new"]["v"].get<std::string>();
		else if (r.kind == "sync" && r.payload["ied"] == "BRK")
			at_sync[r.time] = pos;
	}
	std::vector<std::string> seen;
	for (const auto &p : polls) {
		auto it = at_sync.find(p.sync_t);
		const auto expected = it == at_sync.end() ? std::string("on") : it->second;
		if (p.sync_t > 0 && it == at_sync.end())
			return {false, "reply names a sync time with no sync record"};
		if (expected != p.value)
			return {false, "poll at sync " + std::to_string(to_ms(p.sync_t)) + " ms read " + p.value + ", trace says " + expected};
		if (seen.empty() || seen.back() != p.value)
			seen.push_back(p.value);
	}
	int openings = 0;
	for (std::size_t i = 0; i + 2 < seen.size(); ++i)
		if (seen[i] == "on" && seen[i + 1] == "intermediate" && seen[i + 2] == "off")
			++openings;
	if (openings != 4)
		return {false, "observed " + std::to_string(openings) + " on->intermediate->off sequences, expected 4"};
	return {true, std::to_string(polls.size()) + " polls over TCP, on->intermediate->off seen 4 times, no contradiction"};
}

Verdict criterion_7()
{
	auto doc = scl::parse_scl_file(kDir + "/station.scd");
	auto base = make_station(nullptr, &doc);
	if (!base->validation().findings.empty())
		return {false, "fixture report not empty: " + base->validation().to_json_lines()};
	std::size_t members = 0;
	for (auto &ied : base->ieds().ieds)
		for (const auto &g : ied.gcbs)
			for (const auto &m : g.dataset.members) {
				try {
					ied.model.resolve(m);
					++members;
				} catch (const Error &e) {
					return {false, std::string("dataset member does not resolve: ") + e.what()};
				}
			}

	std::ifstream in(kDir + "/system.json");
	const auto system = nlohmann::json::parse(in);
	int mutations = 0;
	auto expect_one = [&](const scl::Report &report, const std::string &what) -> std::optional<Verdict> {
		++mutations;
		auto n = report.findings.size();
		if (n != 1)
			return Verdict {false, what + ": " + std::to_string(n) + " findings"};
		return std::nullopt;
	};
	for (std::size_t i = 0; i < doc.ieds.size(); ++i) {
		auto &lns = doc.ieds[i].access_points[0].ldevices[0].lns;
		for (std::size_t j = 0; j < lns.size(); ++j) {
			auto removed = doc;
			auto &rl = removed.ieds[i].access_points[0].ldevices[0].lns;
			const auto name = rl[j].name();
			rl.erase(rl.begin() + static_cast<std::ptrdiff_t>(j));
			if (auto v = expect_one(scl::validate_against_model(removed, base->system()), "SCL without " + name))
				return *v;

			auto sys = system;
			for (auto &dev : sys["devices"]) {
				if (dev.value("ied", "") != doc.ieds[i].name)
					continue;
				auto &res = dev["resources"];
				for (auto it = res.begin(); it != res.end(); ++it)
					if ((*it)["name"] == name) {
						res.erase(it);
						break;
					}
			}
			if (auto v = expect_one(make_station(&sys, &doc)->validation(), "system without " + name))
				return *v;
		}
		auto added = doc;
		added.ieds[i].access_points[0].ldevices[0].lns.push_back({"", "PTOC", "7", "PTOC_T", {}});
		if (auto v = expect_one(scl::validate_against_model(added, base->system()), doc.ieds[i].name + " with PTOC7"))
			return *v;
	}
	return {true, "empty report, " + std::to_string(members) + " dataset members resolve, " + std::to_string(mutations) +
	                  " single-LN mutations give one finding each"};
}

Verdict criterion_8()
{
	doctest::Context ctx;
	std::ostringstream sink;
	ctx.setCout(&sink);
	ctx.setOption("no-version", true);
	const int failed = ctx.run();
	const auto text = sink.str();
	auto summary = text.substr(text.rfind("test cases:") == std::string::npos ? 0 : text.rfind("test cases:"));
	summary = summary.substr(0, summary.find('\n'));
	if (failed != 0)
		return {false, text};
	return {true, "ECC and composite suites: " + summary};
}

} // namespace

int main()
{
	const std::pair<const char *, Verdict (*)()> criteria[] = {
		{"persistent fault", criterion_1},  {"transient fault", criterion_2},    {"GOOSE numbering", criterion_3},
		{"GOOSE codec", criterion_4},       {"determinism", criterion_5},        {"server synchronization", criterion_6},
		{"SCL pipeline", criterion_7},      {"ECC engine", criterion_8},
	};
	int failures = 0;
	int n = 0;
	for (const auto &[name, check] : criteria) {
		++n;
		Verdict v;
		try {
			v = check();
		} catch (const std::exception &e) {
			v = {false, std::string("exception: ") + e.what()};
		}
		failures += !v.pass;
		std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << name << "): " << v.detail << std::endl;
	}
	return failures == 0 ? 0 : 1;
}

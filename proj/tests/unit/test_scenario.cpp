#include <doctest.h>

#include <random>

#include "fbsas/harness/runner.hpp"
#include "support/feeder_oracle.hpp"
#include "support/trace_timeline.hpp"

using namespace fbsas;
using namespace fbsas::harness;

namespace {

const std::string kDir = FBSAS_FIXTURE_DIR;

std::unique_ptr<Station> make_station()
{
	return Station::from_files(kDir + "/system.json", kDir + "/station.scd");
}

oracle::Kind oracle_kind(ScriptAction a)
{
	switch (a) {
	case ScriptAction::set_load: return oracle::Kind::set_load;
	case ScriptAction::set_fault: return oracle::Kind::set_fault;
	case ScriptAction::clear_fault: return oracle::Kind::clear_fault;
	case ScriptAction::open_disc: return oracle::Kind::open_disc;
	case ScriptAction::close_disc: return oracle::Kind::close_disc;
	}
	return oracle::Kind::set_load;
}

oracle::Result run_oracle(const Script &s, std::int64_t horizon_ms)
{
	std::vector<oracle::Action> actions;
	for (const auto &st : s.steps)
		if (st.at < from_ms(horizon_ms))
			actions.push_back({to_ms(st.at), oracle_kind(st.action), st.amps});
	return oracle::simulate({}, actions, horizon_ms);
}

struct Outcome {
	RunSummary summary;
	std::vector<oracle::Point> timeline;
	std::vector<TraceRecord> trace;
};

Outcome run_station(const Script &s, std::int64_t horizon_ms)
{
	auto st = make_station();
	run_script(*st, s, from_ms(horizon_ms));
	return {summarize(st->trace()), support::timeline_from_trace(st->trace(), horizon_ms), st->trace()};
}

oracle::Result check_against_oracle(const Script &s, std::int64_t horizon_ms)
{
	auto fb = run_station(s, horizon_ms);
	auto ref = run_oracle(s, horizon_ms);
	auto at = support::first_divergence(fb.timeline, ref.timeline);
	INFO("first divergence at ms " << at);
	if (at >= 0 && at < static_cast<std::int64_t>(fb.timeline.size()) && at < static_cast<std::int64_t>(ref.timeline.size())) {
		INFO("station " << fb.timeline[at].pos << "/" << fb.timeline[at].shot << "/" << fb.timeline[at].locked_out);
		INFO("oracle  " << ref.timeline[at].pos << "/" << ref.timeline[at].shot << "/" << ref.timeline[at].locked_out);
		CHECK(at == -1);
	}
	CHECK(at == -1);
	CHECK(fb.summary.trips == ref.trips);
	CHECK(fb.summary.recloses == ref.recloses);
	return ref;
}

Script script(std::vector<ScriptStep> steps)
{
	return {"test", 0, std::move(steps)};
}

} // namespace

TEST_CASE("no fault leaves the breaker closed")
{
	auto s = load_script_file(kDir + "/scripts/no_fault.json");
	auto out = run_station(s, 3000);
	CHECK(out.summary.trips == 0);
	CHECK(out.summary.recloses == 0);
	CHECK(out.summary.final_breaker_pos == "on");
	CHECK_FALSE(out.summary.locked_out);
	CHECK(out.summary.goose_published == 0);
	check_against_oracle(s, 3000);
}

TEST_CASE("persistent fault: three recloses then lockout")
{
	auto s = load_script_file(kDir + "/scripts/persistent_fault.json");
	auto out = run_station(s, 4000);
	CHECK(out.summary.trips == 4);
	CHECK(out.summary.recloses == 3);
	CHECK(out.summary.locked_out);
	CHECK(out.summary.final_breaker_pos == "off");

	// hand-worked instants for the 1000 A fault applied at 100 ms
	const auto &tl = out.timeline;
	CHECK(tl[159].pos == "on");
	CHECK(tl[160].pos == "intermediate");
	CHECK(tl[200].pos == "off");
	CHECK(tl[699].shot == 0);
	CHECK(tl[700].shot == 1);
	CHECK(tl[760].pos == "on");
	CHECK(tl[820].pos == "intermediate");
	CHECK(tl[1360].shot == 2);
	CHECK(tl[2020].shot == 3);
	CHECK(tl[2080].pos == "on");
	CHECK_FALSE(tl[2139].locked_out);
	CHECK(tl[2140].locked_out);
	CHECK(tl[2179].pos == "intermediate");
	CHECK(tl[2180].pos == "off");
	CHECK(tl[4000].pos == "off");

	auto blk = std::find_if(out.trace.rbegin(), out.trace.rend(), [](const TraceRecord &r) {
		return r.kind == "change" && r.payload.at("ref") == "RECLD0/RREC1.BlkRec.stVal";
	});
	REQUIRE(blk != out.trace.rend());
	CHECK(blk->payload.at("new").at("v") == true);
	CHECK(to_ms(blk->time) == 2140);
	check_against_oracle(s, 4000);
}

TEST_CASE("transient fault cleared in the first dead time")
{
	auto s = load_script_file(kDir + "/scripts/transient_fault.json");
	auto out = run_station(s, 4000);
	CHECK(out.summary.trips == 1);
	CHECK(out.summary.recloses == 1);
	CHECK_FALSE(out.summary.locked_out);
	CHECK(out.summary.final_breaker_pos == "on");
	CHECK(out.timeline[760].pos == "on");
	CHECK(out.timeline[2699].shot == 1);
	CHECK(out.timeline[2700].shot == 0);
	check_against_oracle(s, 4000);
}

TEST_CASE("oracle agrees on the fixed scenarios")
{
	auto p = run_oracle(load_script_file(kDir + "/scripts/persistent_fault.json"), 4000);
	CHECK(p.trips == 4);
	CHECK(p.recloses == 3);
	CHECK(p.timeline[2140].locked_out);
	CHECK(p.timeline.back().pos == "off");
	auto t = run_oracle(load_script_file(kDir + "/scripts/transient_fault.json"), 4000);
	CHECK(t.recloses == 1);
	CHECK(t.timeline.back() == oracle::Point {"on", 0, false});
}

TEST_CASE("disconnector and load changes")
{
	check_against_oracle(script({{0, ScriptAction::set_load, 800},
	                             {300, ScriptAction::open_disc, 0},
	                             {900, ScriptAction::close_disc, 0},
	                             {1000, ScriptAction::set_load, 100}}),
	                     3000);
	check_against_oracle(script({{from_ms(50), ScriptAction::set_fault, 900},
	                             {from_ms(130), ScriptAction::clear_fault, 0},
	                             {from_ms(700), ScriptAction::set_fault, 900},
	                             {from_ms(705), ScriptAction::clear_fault, 0}}),
	                     3000);
}

TEST_CASE("property: random fault profiles match the oracle")
{
	std::mt19937 rng(20261015);
	int tripped = 0, locked = 0;
	for (int run = 0; run < 40; ++run) {
		Script s;
		s.name = "random";
		std::uniform_int_distribution<int> n_steps(1, 8), time(0, 5000), amps(0, 1500), kind(0, 4);
		s.steps.push_back({0, ScriptAction::set_load, static_cast<double>(amps(rng) % 400)});
		for (int i = n_steps(rng); i > 0; --i) {
			ScriptStep st;
			st.at = from_ms(time(rng));
			st.action = static_cast<ScriptAction>(kind(rng));
			st.amps = amps(rng);
			s.steps.push_back(st);
		}
		std::stable_sort(s.steps.begin(), s.steps.end(), [](auto &a, auto &b) { return a.at < b.at; });
		CAPTURE(run);
		auto ref = check_against_oracle(s, 6000);
		tripped += ref.trips > 0;
		locked += ref.timeline.back().locked_out;
	}
	// the generator must reach the interesting regions
	CHECK(tripped >= 10);
	CHECK(locked >= 2);
	MESSAGE("runs with trips: " << tripped << ", ending locked out: " << locked);
}

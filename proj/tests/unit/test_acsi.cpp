#include <doctest.h>

#include <random>
#include <thread>

#include "fbsas/acsi/buffer.hpp"
#include "fbsas/acsi/service.hpp"
#include "fbsas/acsi/tcp_server.hpp"
#include "fbsas/fb/system.hpp"
#include "fbsas/scl/document.hpp"

using namespace fbsas;
using namespace fbsas::acsi;
using nlohmann::json;

namespace {

scl::SclInstance scenario()
{
	return scl::instantiate_from_scl(scl::parse_scl_file(std::string(FBSAS_FIXTURE_DIR) + "/station.scd"));
}

ln::ObjectReference ref(std::string_view s) { return ln::ObjectReference::parse(s); }

class BlockSink : public fb::FunctionBlock {
public:
	explicit BlockSink(std::string name)
		: FunctionBlock(std::move(name), "SINK", fb::InterfaceDecl().in_event("SET_BlkRec", {"BlkRec"}).in_data("BlkRec", false))
	{
	}
	void on_event(std::string_view, fb::EventContext &) override
	{
		++hits;
		last = in<bool>("BlkRec");
	}
	int hits = 0;
	bool last = false;
};

} // namespace

TEST_CASE("buffer starts from model defaults with declared keys only")
{
	auto inst = scenario();
	const auto &brk = *inst.find("BRK");
	ServerBuffer buf(brk.model, brk.exposed);
	REQUIRE(buf.entries().size() == 1);
	const auto *e = buf.find(ref("BRKLD0/XCBR1.Pos.stVal"));
	REQUIRE(e);
	CHECK(e->value == DataValue {make_enum("Dbpos", "on")});
	CHECK(e->sync_seq == 0);
	CHECK(e->q.validity == "good");
	CHECK(buf.find(ref("BRKLD0/XCBR1.Pos.q")) == nullptr);
}

TEST_CASE("sync_cycle applies one change, ignores empty batches and is idempotent on replay")
{
	auto inst = scenario();
	auto &brk = *inst.find("BRK");
	ServerBuffer buf(brk.model, brk.exposed);

	CHECK(buf.sync_cycle({}, from_ms(5)) == 0);
	CHECK(buf.find(ref("BRKLD0/XCBR1.Pos.stVal"))->sync_seq == 0);

	auto rec = brk.model.update_attribute(ref("BRKLD0/XCBR1.Pos.stVal"), make_enum("Dbpos", "off"), from_ms(120));
	REQUIRE(rec);
	std::vector<ln::ChangeRecord> batch {*rec};
	CHECK(buf.sync_cycle(batch, from_ms(130)) == 1);
	auto after = buf.entries();
	const auto &e = after.at(ref("BRKLD0/XCBR1.Pos.stVal"));
	CHECK(e.value == DataValue {make_enum("Dbpos", "off")});
	CHECK(e.t == from_ms(120));
	CHECK(e.sync_seq == 1);
	CHECK(buf.sync_t() == from_ms(130));

	CHECK(buf.sync_cycle(batch, from_ms(140)) == 0);
	CHECK(buf.entries() == after);
}

TEST_CASE("records for attributes outside the buffer are skipped")
{
	auto inst = scenario();
	auto &prot = *inst.find("PROT");
	ServerBuffer buf(prot.model, {ref("PROTLD0/PTRC1.Tr.general")});
	auto r1 = prot.model.update_attribute(ref("PROTLD0/PTOC1.Op.general"), true, from_ms(1));
	auto r2 = prot.model.update_attribute(ref("PROTLD0/PTRC1.Tr.general"), true, from_ms(1));
	std::vector<ln::ChangeRecord> batch {*r1, *r2};
	CHECK(buf.sync_cycle(batch, from_ms(1)) == 1);
	CHECK(buf.skipped() == 1);
}

TEST_CASE("property: buffer equals model after any batching, replay changes nothing")
{
	std::mt19937_64 rng(20261);
	auto inst = scenario();
	for (int iter = 0; iter < 200; ++iter) {
		auto rec = *scenario().find("REC");
		auto &model = rec.model;
		ServerBuffer buf(model, rec.exposed);
		std::vector<ln::ChangeRecord> log;
		model.add_listener([&](const ln::ChangeRecord &c) { log.push_back(c); });

		const std::vector<ln::ObjectReference> refs {ref("RECLD0/RREC1.Op.general"), ref("RECLD0/RREC1.BlkRec.stVal"),
		                                             ref("RECLD0/RREC1.BlkRec.q")};
		VirtualTime t = 0;
		std::size_t synced = 0;
		std::map<ln::ObjectReference, std::uint64_t> last_seq;
		for (int step = 0; step < 40; ++step) {
			t += from_ms(static_cast<std::int64_t>(rng() % 3));
			const auto &r = refs[rng() % refs.size()];
			if (r.attribute == "q")
				model.update_attribute(r, make_enum("Validity", rng() % 2 ? "good" : "questionable"), t);
			else
				model.update_attribute(r, static_cast<bool>(rng() % 2), t);

			if (rng() % 4 == 0 || step == 39) {
				std::span<const ln::ChangeRecord> batch(log.data() + synced, log.size() - synced);
				buf.sync_cycle(batch, t);
				auto before = buf.entries();
				CHECK(buf.sync_cycle(batch, t) == 0);
				CHECK(buf.entries() == before);
				synced = log.size();

				// Staleness oracle: each buffered key matches the live model.
				for (const auto &[k, e] : buf.entries()) {
					auto live = model.resolve(k);
					CHECK(e.value == live.value);
					CHECK(e.q == live.q);
					CHECK(e.t == live.t);
					CHECK(e.sync_seq >= last_seq[k]);
					last_seq[k] = e.sync_seq;
				}
			}
		}
	}
}

TEST_CASE("service get, set and dir")
{
	auto inst = scenario();
	fb::InboundQueue inbound;
	AcsiService brk(*inst.find("BRK"), "BRK_IED", inbound);
	AcsiService rec(*inst.find("REC"), "REC_IED", inbound);
	AcsiService ct(*inst.find("CT"), "CT_IED", inbound);

	SUBCASE("fresh server returns initial values")
	{
		auto r = brk.handle({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}}, 1);
		CHECK(r["ok"] == true);
		CHECK(r["value"]["v"] == "on");
		CHECK(r["q"]["validity"] == "good");
		CHECK(r["t"] == 0);
		CHECK(r["sync_seq"] == 0);
		auto a = ct.handle({{"op", "get"}, {"ref", "CTLD0/TCTR1.Amp.mag"}, {"id", 7}}, 1);
		CHECK(a["value"]["v"] == 0.0);
		CHECK(a["id"] == 7);
	}
	SUBCASE("errors")
	{
		CHECK(brk.handle({{"op", "get"}, {"ref", "BRKLD0/XCBR9.Pos.stVal"}}, 1)["err"] == "REF_UNKNOWN");
		CHECK(brk.handle({{"op", "get"}, {"ref", "not a ref"}}, 1)["err"] == "REF_UNKNOWN");
		CHECK(brk.handle({{"op", "get"}}, 1)["err"] == "BAD_REQUEST");
		CHECK(brk.handle({{"op", "frobnicate"}}, 1)["err"] == "BAD_REQUEST");
		CHECK(brk.handle(json::array(), 1)["err"] == "BAD_REQUEST");
		CHECK(brk.handle_text("{nope", 1)["err"] == "BAD_REQUEST");
		CHECK(ct.handle({{"op", "set"}, {"ref", "CTLD0/TCTR1.Amp.mag"}, {"value", 5.0}}, 1)["err"] == "REF_READONLY");
		CHECK(brk.handle({{"op", "set"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}, {"value", true}}, 1)["err"] == "REF_READONLY");
		CHECK(rec.handle({{"op", "set"}, {"ref", "RECLD0/RREC1.BlkRec.stVal"}, {"value", 1.5}}, 1)["err"] == "TYPE_MISMATCH");
		CHECK(inbound.drain().empty());
	}
	SUBCASE("boolean to a DPC status is a type mismatch")
	{
		auto brk_ied = *inst.find("BRK");
		brk_ied.writable.insert(ref("BRKLD0/XCBR1.Pos.stVal"));
		AcsiService svc(brk_ied, "BRK_IED", inbound);
		CHECK(svc.handle({{"op", "set"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}, {"value", true}}, 1)["err"] == "TYPE_MISMATCH");
		auto ok = svc.handle({{"op", "set"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}, {"value", "off"}}, 1);
		CHECK(ok["ok"] == true);
	}
	SUBCASE("accepted writes become inbound events addressed to the MFB")
	{
		auto r = rec.handle({{"op", "set"}, {"ref", "RECLD0/RREC1.BlkRec.stVal"}, {"value", true}}, 42);
		CHECK(r["ok"] == true);
		CHECK(r["accepted"] == true);
		auto items = inbound.drain();
		REQUIRE(items.size() == 1);
		auto &ev = std::get<fb::InboundEvent>(items[0]);
		CHECK(ev.target == "REC_IED/RREC1/MFB.SET_BlkRec");
		REQUIRE(ev.data.size() == 1);
		CHECK(ev.data[0].first == "BlkRec");
		CHECK(ev.data[0].second == DataValue {true});
		CHECK(ev.origin == "acsi:REC:42");
		// Typed form works too, and the buffer is untouched by the write itself.
		CHECK(rec.handle({{"op", "set"}, {"ref", "RECLD0/RREC1.BlkRec.stVal"}, {"value", {{"type", "bool"}, {"v", false}}}},
		                 1)["ok"] == true);
		CHECK(rec.handle({{"op", "get"}, {"ref", "RECLD0/RREC1.BlkRec.stVal"}}, 1)["value"]["v"] == false);
		CHECK(rec.accepted_writes() == 2);
	}
	SUBCASE("directory listing")
	{
		auto names = [](const json &r) { return r["names"].get<std::vector<std::string>>(); };
		CHECK(names(brk.handle({{"op", "dir"}, {"scope", "BRK"}}, 1)) == std::vector<std::string> {"BRKLD0"});
		CHECK(names(brk.handle({{"op", "dir"}, {"scope", "BRK_IED"}}, 1)) == std::vector<std::string> {"BRKLD0"});
		CHECK(names(brk.handle({{"op", "dir"}}, 1)) == std::vector<std::string> {"BRKLD0"});
		CHECK(names(brk.handle({{"op", "dir"}, {"scope", "BRKLD0"}}, 1)) == std::vector<std::string> {"LLN0", "XCBR1"});
		CHECK(names(brk.handle({{"op", "dir"}, {"scope", "BRKLD0/XCBR1"}}, 1)) == std::vector<std::string> {"Pos"});
		CHECK(names(rec.handle({{"op", "dir"}, {"scope", "RECLD0/RREC1"}}, 1)) == std::vector<std::string> {"BlkRec", "Op"});
		CHECK(brk.handle({{"op", "dir"}, {"scope", "NOLD0"}}, 1)["err"] == "SCOPE_UNKNOWN");
	}
}

TEST_CASE("published snapshots are what readers see")
{
	auto inst = scenario();
	auto &brk = *inst.find("BRK");
	fb::InboundQueue inbound;
	AcsiService svc(brk, "BRK_IED", inbound);
	ServerBuffer buf(brk.model, brk.exposed);
	auto rec = brk.model.update_attribute(ref("BRKLD0/XCBR1.Pos.stVal"), make_enum("Dbpos", "off"), from_ms(10));
	std::vector<ln::ChangeRecord> batch {*rec};
	buf.sync_cycle(batch, from_ms(10));
	auto before = svc.snapshot();
	CHECK(svc.handle({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}}, 1)["value"]["v"] == "on");
	svc.publish(buf);
	auto r = svc.handle({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}}, 1);
	CHECK(r["value"]["v"] == "off");
	CHECK(r["sync_seq"] == 1);
	CHECK(r["sync_t"] == from_ms(10));
	// Old snapshot remains valid for a reader that still holds it.
	CHECK(before->entries.at(ref("BRKLD0/XCBR1.Pos.stVal")).value == DataValue {make_enum("Dbpos", "on")});
}

TEST_CASE("accepted write reaches the scheduler exactly once")
{
	auto inst = scenario();
	fb::SystemModel sys;
	auto &dev = sys.add_device("REC_IED");
	auto &res = dev.add_resource("RREC1");
	auto &sink = static_cast<BlockSink &>(res.add(std::make_unique<BlockSink>("MFB")));
	std::vector<TraceRecord> trace;
	sys.set_trace_sink([&](const TraceRecord &r) { trace.push_back(r); });
	sys.start();

	AcsiService svc(*inst.find("REC"), "REC_IED", sys.inbound());
	CHECK(svc.handle({{"op", "set"}, {"ref", "RECLD0/RREC1.BlkRec.stVal"}, {"value", true}}, 3)["ok"] == true);
	sys.step(from_ms(1));
	sys.step(from_ms(2));
	CHECK(sink.hits == 1);
	CHECK(sink.last);
	auto inbound = std::count_if(trace.begin(), trace.end(), [](const TraceRecord &r) { return r.kind == "inbound"; });
	CHECK(inbound == 1);
}

TEST_CASE("TCP server speaks length-prefixed JSON and keeps sessions independent")
{
	auto inst = scenario();
	fb::InboundQueue inbound;
	AcsiService svc(*inst.find("BRK"), "BRK_IED", inbound);
	AcsiTcpServer server(svc, "127.0.0.1", 0);
	server.start();
	REQUIRE(server.port() != 0);

	AcsiClient a("127.0.0.1", server.port());
	AcsiClient b("127.0.0.1", server.port());
	auto hello = a.request({{"op", "hello"}});
	CHECK(hello["version"] == kProtocolVersion);
	CHECK(hello["ied"] == "BRK");

	CHECK(a.request_raw("garbage")["err"] == "BAD_REQUEST");
	// The session survives an error reply.
	CHECK(a.request({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}})["value"]["v"] == "on");
	CHECK(b.request({{"op", "get"}, {"ref", "BRKLD0/NOPE1.Pos.stVal"}})["err"] == "REF_UNKNOWN");
	CHECK(b.request({{"op", "dir"}, {"scope", "BRKLD0/XCBR1"}})["names"] == json::array({"Pos"}));

	std::vector<std::thread> clients;
	std::atomic<int> good {0};
	for (int i = 0; i < 4; ++i)
		clients.emplace_back([&] {
			AcsiClient c("127.0.0.1", server.port());
			for (int k = 0; k < 25; ++k)
				if (c.request({{"op", "get"}, {"ref", "BRKLD0/XCBR1.Pos.stVal"}, {"id", k}})["id"] == k)
					++good;
		});
	for (auto &t : clients)
		t.join();
	CHECK(good == 100);
	CHECK(server.sessions_opened() == 6);

	// A frame over the limit closes that session only.
	{
		AcsiClient c("127.0.0.1", server.port());
		std::string big(kMaxFrame + 1, ' ');
		CHECK_THROWS_AS(c.request_raw(big), Error);
	}
	CHECK(a.request({{"op", "hello"}})["ok"] == true);
	server.stop();
}

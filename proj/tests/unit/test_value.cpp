#include <doctest.h>

#include "fbsas/core/error.hpp"
#include "fbsas/core/trace.hpp"
#include "fbsas/core/value.hpp"

using namespace fbsas;

TEST_CASE("type names parse back to the same type")
{
	for (const char *name : {"bool", "i32", "f64", "text", "ts", "enum:Dbpos", "enum:Validity"}) {
		auto t = parse_type(name);
		CHECK(type_name(t) == name);
		CHECK(type_of(default_value(t)) == t);
	}
	CHECK_THROWS_AS(parse_type("enum:Nope"), Error);
	CHECK_THROWS_AS(parse_type("float"), Error);
}

TEST_CASE("enumeration values must belong to their tag")
{
	CHECK(make_enum("Dbpos", "on") == Enumerated {"Dbpos", "on"});
	CHECK_THROWS_AS(make_enum("Dbpos", "open"), TypeMismatch);
	CHECK(std::get<Enumerated>(default_value(parse_type("enum:Dbpos"))).value == "intermediate");
}

TEST_CASE("typed JSON round-trips every variant")
{
	std::vector<DataValue> values {true, std::int32_t {-7}, 2.5, std::string("x"), make_enum("Dbpos", "off"),
	                               Timestamp {123}};
	for (const auto &v : values) {
		auto j = to_json(v);
		CHECK(value_from_json(nlohmann::json::parse(j.dump())) == v);
	}
	CHECK(to_json(make_enum("Dbpos", "on")).dump() == R"({"type":"enum","tag":"Dbpos","v":"on"})");
}

TEST_CASE("coerce converts JSON scalars to the requested type")
{
	CHECK(coerce(5, parse_type("f64")) == DataValue {5.0});
	CHECK(coerce("on", parse_type("enum:Dbpos")) == DataValue {make_enum("Dbpos", "on")});
	CHECK_THROWS_AS(coerce("on", parse_type("bool")), TypeMismatch);
	CHECK_THROWS_AS(coerce(true, parse_type("enum:Dbpos")), TypeMismatch);
}

TEST_CASE("trace lines keep a stable field order")
{
	TraceRecord r {from_ms(5), "D/R/F", "event", {}};
	r.payload["in"] = "REQ";
	auto line = to_json_line(r);
	CHECK(line == R"({"time":5000000,"source":"D/R/F","kind":"event","payload":{"in":"REQ"}})");
	auto back = trace_from_json_line(line);
	CHECK(back.time == r.time);
	CHECK(to_json_line(back) == line);
}

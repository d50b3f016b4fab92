#include "fbsas/core/trace.hpp"

namespace fbsas {

std::string to_json_line(const TraceRecord &r)
{
	nlohmann::ordered_json j;
	j["time"] = r.time;
	j["source"] = r.source;
	j["kind"] = r.kind;
	j["payload"] = r.payload;
	return j.dump();
}

TraceRecord trace_from_json_line(const std::string &line)
{
	auto j = nlohmann::ordered_json::parse(line);
	TraceRecord r;
	r.time = j.at("time").get<VirtualTime>();
	r.source = j.at("source").get<std::string>();
	r.kind = j.at("kind").get<std::string>();
	r.payload = j.at("payload");
	return r;
}

} // namespace fbsas

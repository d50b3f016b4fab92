#include "fbsas/harness/summary.hpp"

#include <fstream>

#include "fbsas/core/error.hpp"

namespace fbsas::harness {

namespace {

/// "LD/PREFIXCLASSn.DO.da" names a node of class `cls` with data object `dobj`.
bool matches(const std::string &ref, std::string_view cls, std::string_view dobj)
{
	auto slash = ref.find('/');
	auto dot = ref.find('.', slash);
	if (slash == std::string::npos || dot == std::string::npos)
		return false;
	std::string_view ln(ref.data() + slash + 1, dot - slash - 1);
	while (!ln.empty() && ln.back() >= '0' && ln.back() <= '9')
		ln.remove_suffix(1);
	if (!ln.ends_with(cls))
		return false;
	auto rest = std::string_view(ref).substr(dot + 1);
	return rest.starts_with(dobj) && rest.size() > dobj.size() && rest[dobj.size()] == '.';
}

/// Typed values are {"type", "v"}; the plain value is "v".
const nlohmann::ordered_json &plain(const nlohmann::ordered_json &v)
{
	return v.is_object() && v.contains("v") ? v.at("v") : v;
}

bool is_true(const nlohmann::ordered_json &v)
{
	return plain(v).is_boolean() && plain(v).get<bool>();
}

} // namespace

RunSummary summarize(std::span<const TraceRecord> trace)
{
	RunSummary s;
	for (const auto &r : trace) {
		s.end_ms = std::max(s.end_ms, to_ms(r.time));
		if (r.kind == "init") {
			for (const auto &[ref, v] : r.payload.at("values").items())
				if (matches(ref, "XCBR", "Pos") && plain(v).is_string())
					s.final_breaker_pos = plain(v).get<std::string>();
		} else if (r.kind == "change") {
			const auto ref = r.payload.at("ref").get<std::string>();
			const auto &v = r.payload.at("new");
			if (matches(ref, "PTRC", "Tr") && is_true(v) && !is_true(r.payload.at("old")))
				++s.trips;
			else if (matches(ref, "RREC", "Op") && is_true(v) && !is_true(r.payload.at("old")))
				++s.recloses;
			else if (matches(ref, "XCBR", "Pos") && plain(v).is_string())
				s.final_breaker_pos = plain(v).get<std::string>();
		} else if (r.kind == "state") {
			s.locked_out = r.payload.value("locked_out", false);
			s.shot_count = r.payload.value("shot_count", 0);
		} else if (r.kind == "goose_pub") {
			++s.goose_published;
		} else if (r.kind == "goose_rx") {
			++s.goose_delivered;
		} else if (r.kind == "sync") {
			++s.sync_cycles;
		}
	}
	return s;
}

nlohmann::ordered_json to_json(const RunSummary &s)
{
	return {{"trips", s.trips},
	        {"recloses", s.recloses},
	        {"final_breaker_pos", s.final_breaker_pos},
	        {"locked_out", s.locked_out},
	        {"shot_count", s.shot_count},
	        {"goose_published", s.goose_published},
	        {"goose_delivered", s.goose_delivered},
	        {"sync_cycles", s.sync_cycles},
	        {"end_ms", s.end_ms}};
}

void write_trace(const std::filesystem::path &path, std::span<const TraceRecord> trace)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw Error("cannot write " + path.string());
	for (const auto &r : trace)
		out << to_json_line(r) << '\n';
	if (!out)
		throw Error("write failed: " + path.string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path.string());
	std::vector<TraceRecord> out;
	std::string line;
	std::size_t n = 0;
	while (std::getline(in, line)) {
		++n;
		if (line.empty())
			continue;
		try {
			out.push_back(trace_from_json_line(line));
		} catch (const std::exception &e) {
			throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
		}
	}
	return out;
}

} // namespace fbsas::harness

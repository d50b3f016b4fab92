#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/core/time.hpp"

namespace fbsas {

/// One line of the run trace. `kind` is one of: event, change, goose_pub, goose_rx,
/// inbound, sync, init, drop, script, state.
struct TraceRecord {
	VirtualTime time = 0;
	std::string source;
	std::string kind;
	nlohmann::ordered_json payload;
};

/// Stable single-line JSON rendering, field order time, source, kind, payload.
std::string to_json_line(const TraceRecord &r);
TraceRecord trace_from_json_line(const std::string &line);

using TraceSink = std::function<void(const TraceRecord &)>;

} // namespace fbsas

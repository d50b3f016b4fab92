#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/core/trace.hpp"

namespace fbsas::harness {

/// Scenario outcome, computed from trace records alone.
struct RunSummary {
	int trips = 0;    ///< PTRC Tr.general rising edges
	int recloses = 0; ///< RREC Op.general rising edges
	std::string final_breaker_pos = "on";
	bool locked_out = false;
	int shot_count = 0;
	std::size_t goose_published = 0;
	std::size_t goose_delivered = 0;
	std::size_t sync_cycles = 0;
	std::int64_t end_ms = 0;

	friend bool operator==(const RunSummary &, const RunSummary &) = default;
};

RunSummary summarize(std::span<const TraceRecord> trace);
nlohmann::ordered_json to_json(const RunSummary &s);

void write_trace(const std::filesystem::path &path, std::span<const TraceRecord> trace);
std::vector<TraceRecord> read_trace(const std::filesystem::path &path);

} // namespace fbsas::harness

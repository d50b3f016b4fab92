#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/acsi/buffer.hpp"
#include "fbsas/acsi/service.hpp"
#include "fbsas/fb/system.hpp"
#include "fbsas/goose/bus.hpp"
#include "fbsas/goose/control_block.hpp"
#include "fbsas/goose/udp_transport.hpp"
#include "fbsas/harness/script.hpp"
#include "fbsas/power/plant.hpp"
#include "fbsas/scl/document.hpp"
#include "fbsas/scl/instantiate.hpp"
#include "fbsas/scl/validate.hpp"

namespace fbsas::harness {

/// Fixture problems found before the first simulation step.
class FixtureError : public Error {
public:
	using Error::Error;
};

enum class Transport { inproc, udp };

struct StationOptions {
	Transport transport = Transport::inproc;
	goose::UdpOptions udp;
};

/// Plant resource and feeder instance the operator actions go to.
inline constexpr std::string_view kPlantResource = "DISPLAY/PLANT";
inline constexpr std::string_view kFeeder = "FEEDER";

/// The substation: IED models instantiated from SCL, the function block system wired to
/// them, the GOOSE bus and one ACSI service per IED. Everything but the services and
/// `latest_state` runs on the scheduler thread.
class Station {
public:
	Station(scl::SclDocument scl, const nlohmann::json &system, StationOptions options = {});
	~Station();

	Station(const Station &) = delete;
	Station &operator=(const Station &) = delete;

	static std::unique_ptr<Station> from_files(const std::filesystem::path &system, const std::filesystem::path &scl,
	                                           StationOptions options = {});

	fb::SystemModel &system() { return *system_; }
	const scl::SclDocument &scl() const { return doc_; }
	scl::SclInstance &ieds() { return instance_; }
	const scl::Report &validation() const { return report_; }

	acsi::AcsiService *service(std::string_view ied);
	const std::vector<std::string> &ied_names() const { return ied_names_; }
	goose::GooseBus &bus() { return bus_; }

	/// Throws FixtureError when validation found anything. Traces one "init" record per
	/// IED, starts the resources and processes time 0.
	void start();
	bool started() const { return started_; }

	/// Dispatches an operator action to the feeder at the current time, traced as "script".
	void apply(const ScriptStep &step);
	/// Processes everything up to `until` and refreshes `latest_state`.
	void advance(VirtualTime until);

	power::FeederState feeder() const;
	/// {"t_ms", "feeder", "lns": {IED: {ref: value}}} from the server buffers.
	nlohmann::ordered_json state_json() const;
	/// Last state published by `advance`; null before start. Thread-safe.
	std::shared_ptr<const nlohmann::ordered_json> latest_state() const;

	const std::vector<TraceRecord> &trace() const { return trace_; }
	/// Also called for every record, on the scheduler thread.
	void set_trace_listener(TraceSink sink) { listener_ = std::move(sink); }

private:
	class ForwardTransport;

	void register_blocks(fb::TypeRegistry &registry);
	void record(const TraceRecord &r);

	scl::SclDocument doc_;
	scl::SclInstance instance_;
	std::vector<std::string> ied_names_;
	std::map<std::string, acsi::ServerBuffer, std::less<>> buffers_;
	std::map<std::string, std::unique_ptr<goose::GooseControlBlock>, std::less<>> gcbs_;
	goose::GooseBus bus_;
	std::unique_ptr<ForwardTransport> transport_;
	std::unique_ptr<fb::SystemModel> system_;
	std::unique_ptr<goose::InProcTransport> inproc_;
	std::unique_ptr<goose::UdpTransport> udp_;
	std::map<std::string, std::unique_ptr<acsi::AcsiService>, std::less<>> services_;
	scl::Report report_;
	const power::RrecBlock *rrec_ = nullptr;
	StationOptions options_;
	bool started_ = false;

	std::vector<TraceRecord> trace_;
	TraceSink listener_;

	mutable std::mutex state_mutex_;
	std::shared_ptr<const nlohmann::ordered_json> state_;
};

} // namespace fbsas::harness

#include "fbsas/harness/station.hpp"

#include <fstream>

#include "fbsas/acsi/sync_block.hpp"
#include "fbsas/fb/loader.hpp"
#include "fbsas/goose/sifbs.hpp"
#include "fbsas/power/ln_blocks.hpp"

namespace fbsas::harness {

class Station::ForwardTransport : public goose::GooseTransport {
public:
	void send(const goose::GooseMessage &m, VirtualTime at) override
	{
		if (target)
			target->send(m, at);
	}

	goose::GooseTransport *target = nullptr;
};

namespace {

std::uint16_t app_id_param(const nlohmann::json &p)
{
	const auto &v = p.at("app_id");
	long long id = 0;
	if (v.is_string()) {
		auto text = v.get<std::string>();
		std::size_t used = 0;
		id = std::stoll(text, &used, 0);
		if (used != text.size())
			throw Error("app_id '" + text + "' is not a number");
	} else {
		id = v.get<long long>();
	}
	if (id <= 0 || id > 0xFFFF)
		throw Error("app_id out of range");
	return static_cast<std::uint16_t>(id);
}

std::vector<ValueType> types_param(const nlohmann::json &p)
{
	std::vector<ValueType> out;
	for (const auto &t : p.at("types"))
		out.push_back(parse_type(t.get<std::string>()));
	return out;
}

std::string_view feeder_event(ScriptAction a)
{
	switch (a) {
	case ScriptAction::set_load: return "SET_LOAD";
	case ScriptAction::set_fault: return "SET_FAULT";
	case ScriptAction::clear_fault: return "CLEAR_FAULT";
	case ScriptAction::open_disc: return "OPEN_DISC";
	case ScriptAction::close_disc: return "CLOSE_DISC";
	}
	return {};
}

} // namespace

Station::Station(scl::SclDocument scl, const nlohmann::json &system, StationOptions options)
	: doc_(std::move(scl)), transport_(std::make_unique<ForwardTransport>()), options_(std::move(options))
{
	try {
		instance_ = scl::instantiate_from_scl(doc_);
	} catch (const Error &e) {
		throw FixtureError(std::string("SCL: ") + e.what());
	}
	for (auto &ied : instance_.ieds) {
		ied_names_.push_back(ied.name);
		buffers_.emplace(ied.name, acsi::ServerBuffer(ied.model, ied.exposed));
	}

	auto registry = fb::standard_registry();
	register_blocks(registry);
	try {
		system_ = fb::load_system(system, registry);
	} catch (const Error &e) {
		throw FixtureError(std::string("system: ") + e.what());
	}
	system_->set_trace_sink([this](const TraceRecord &r) { record(r); });
	report_ = scl::validate_against_model(doc_, *system_);

	if (options_.transport == Transport::udp) {
		udp_ = std::make_unique<goose::UdpTransport>(*system_, bus_, options_.udp);
		transport_->target = udp_.get();
	} else {
		inproc_ = std::make_unique<goose::InProcTransport>(*system_, bus_);
		transport_->target = inproc_.get();
	}

	for (const auto &dev : system_->devices()) {
		if (dev->ied().empty() || !instance_.find(dev->ied()) || services_.contains(dev->ied()))
			continue;
		services_.emplace(dev->ied(),
		                  std::make_unique<acsi::AcsiService>(*instance_.find(dev->ied()), dev->name(), system_->inbound()));
	}
	for (const auto &dev : system_->devices())
		for (const auto &res : dev->resources())
			for (const auto &block : res->blocks()) {
				if (auto *sync = dynamic_cast<acsi::ServerSyncBlock *>(block.get())) {
					auto it = services_.find(sync->ied());
					sync->attach(it == services_.end() ? nullptr : it->second.get());
				} else if (auto *rrec = dynamic_cast<const power::RrecBlock *>(block.get()); rrec && !rrec_) {
					rrec_ = rrec;
				}
			}
	for (auto &[name, service] : services_)
		service->publish(buffers_.at(name));

	for (auto &ied : instance_.ieds)
		ied.model.add_listener([this, name = ied.name](const ln::ChangeRecord &c) {
			system_->trace({system_->now(), name, "change", ln::to_json(c)});
		});
	if (!system_->find_resource(kPlantResource))
		throw FixtureError("system: no plant resource " + std::string(kPlantResource));
}

Station::~Station()
{
	if (udp_)
		udp_->stop();
}

std::unique_ptr<Station> Station::from_files(const std::filesystem::path &system, const std::filesystem::path &scl,
                                             StationOptions options)
{
	scl::SclDocument doc;
	try {
		doc = scl::parse_scl_file(scl.string());
	} catch (const Error &e) {
		throw FixtureError(scl.string() + ": " + e.what());
	}
	std::ifstream in(system);
	if (!in)
		throw FixtureError("cannot open " + system.string());
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(in);
	} catch (const nlohmann::json::exception &e) {
		throw FixtureError(system.string() + ": " + e.what());
	}
	return std::make_unique<Station>(std::move(doc), j, std::move(options));
}

void Station::register_blocks(fb::TypeRegistry &registry)
{
	power::register_plant_algorithms(registry);
	power::register_ln_blocks(registry, [this](const std::string &ied) -> ln::DataModel & {
		auto *inst = instance_.find(ied);
		if (!inst)
			throw Error("unknown IED '" + ied + "'");
		return inst->model;
	}, false);

	registry.add_factory("GOOSE_PUB", [this](const std::string &name, const nlohmann::json &p) {
		const auto ied = p.at("ied").get<std::string>();
		const auto gcb = p.at("gcb").get<std::string>();
		auto *inst = instance_.find(ied);
		if (!inst)
			throw Error("unknown IED '" + ied + "'");
		auto cfg = std::find_if(inst->gcbs.begin(), inst->gcbs.end(), [&](auto &g) { return g.name == gcb; });
		if (cfg == inst->gcbs.end())
			throw Error(ied + " has no control block '" + gcb + "'");
		auto key = ied + "/" + gcb;
		if (gcbs_.contains(key))
			throw Error("control block " + key + " is published twice");
		std::vector<ValueType> types;
		for (const auto &m : cfg->dataset.members)
			types.push_back(type_of(inst->model.resolve(m).value));
		bus_.register_publisher(cfg->app_id, cfg->go_id, std::move(types));
		auto &block = *gcbs_.emplace(key, std::make_unique<goose::GooseControlBlock>(*cfg)).first->second;
		return std::make_unique<goose::GoosePublisherBlock>(name, block, inst->model, *transport_);
	});

	registry.add_factory("GOOSE_SUB", [this](const std::string &name, const nlohmann::json &p) {
		goose::SubscriptionFilter filter {app_id_param(p), std::nullopt};
		if (p.contains("go_id"))
			filter.go_id = p.at("go_id").get<std::string>();
		return std::make_unique<goose::GooseSubscriberBlock>(name, bus_, std::move(filter), types_param(p));
	});

	registry.add_factory("SERVER_SYNC", [this](const std::string &name, const nlohmann::json &p) {
		const auto ied = p.at("ied").get<std::string>();
		auto *inst = instance_.find(ied);
		if (!inst)
			throw Error("unknown IED '" + ied + "'");
		return std::make_unique<acsi::ServerSyncBlock>(name, ied, inst->model, buffers_.find(ied)->second, nullptr);
	});
}

acsi::AcsiService *Station::service(std::string_view ied)
{
	auto it = services_.find(ied);
	return it == services_.end() ? nullptr : it->second.get();
}

void Station::record(const TraceRecord &r)
{
	trace_.push_back(r);
	if (listener_)
		listener_(r);
}

void Station::start()
{
	if (started_)
		return;
	if (!report_.consistent()) {
		std::string msg = "SCL and system disagree:";
		for (const auto &f : report_.findings)
			msg += "\n  " + f.code + " " + f.path + ": " + f.message;
		throw FixtureError(msg);
	}
	if (udp_)
		udp_->start();
	for (const auto &ied : instance_.ieds) {
		nlohmann::ordered_json values = nlohmann::ordered_json::object();
		for (const auto &ref : ied.exposed)
			values[ref.render()] = fbsas::to_json(ied.model.resolve(ref).value);
		system_->trace({system_->now(), ied.name, "init", {{"values", std::move(values)}}});
	}
	started_ = true;
	system_->start();
	advance(system_->now());
}

void Station::apply(const ScriptStep &step)
{
	auto &plant = system_->resource(kPlantResource);
	std::vector<std::pair<std::string, DataValue>> data;
	if (step.action == ScriptAction::set_load || step.action == ScriptAction::set_fault)
		data.emplace_back("AMPS", step.amps);
	system_->trace({system_->now(), "script", "script", to_json(step)});
	system_->dispatch_event(plant, kFeeder, feeder_event(step.action), system_->now(), std::move(data));
}

void Station::advance(VirtualTime until)
{
	system_->step(until);
	auto snap = std::make_shared<const nlohmann::ordered_json>(state_json());
	std::lock_guard lock(state_mutex_);
	state_ = std::move(snap);
}

power::FeederState Station::feeder() const
{
	auto s = power::read_feeder(*system_->find_resource(kPlantResource), kFeeder);
	if (rrec_)
		s.recloser = rrec_->state();
	return s;
}

nlohmann::ordered_json Station::state_json() const
{
	nlohmann::ordered_json j;
	j["t_ms"] = to_ms(system_->now());
	j["feeder"] = power::to_json(feeder());
	nlohmann::ordered_json lns = nlohmann::ordered_json::object();
	for (const auto &[ied, buffer] : buffers_) {
		nlohmann::ordered_json values = nlohmann::ordered_json::object();
		for (const auto &[ref, entry] : buffer.entries())
			values[ref.render()] = fbsas::to_json(entry.value);
		lns[ied] = std::move(values);
	}
	j["lns"] = std::move(lns);
	return j;
}

std::shared_ptr<const nlohmann::ordered_json> Station::latest_state() const
{
	std::lock_guard lock(state_mutex_);
	return state_;
}

} // namespace fbsas::harness

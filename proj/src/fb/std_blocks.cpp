#include "fbsas/fb/std_blocks.hpp"

#include "fbsas/fb/registry.hpp"
#include "fbsas/fb/topic_bus.hpp"

namespace fbsas::fb {

namespace {

std::vector<ValueType> topic_types(const std::string &instance, const nlohmann::json &params)
{
	if (!params.is_object() || !params.contains("topic") || !params["topic"].is_string())
		throw Error(instance + ": parameter 'topic' (string) is required");
	std::vector<ValueType> types;
	if (params.contains("types")) {
		for (const auto &t : params["types"])
			types.push_back(parse_type(t.get<std::string>()));
	}
	return types;
}

InterfaceDecl channel_interface(const std::vector<ValueType> &types, bool publisher)
{
	InterfaceDecl iface;
	std::vector<std::string> names;
	for (std::size_t i = 0; i < types.size(); ++i) {
		names.push_back((publisher ? "SD_" : "RD_") + std::to_string(i + 1));
		if (publisher)
			iface.in_data(names.back(), default_value(types[i]));
		else
			iface.out_data(names.back(), default_value(types[i]));
	}
	if (publisher)
		iface.in_event("REQ", names).out_event("CNF");
	else
		iface.out_event("IND", names);
	return iface;
}

VirtualTime delay_of(const FunctionBlock &fb)
{
	auto ms = fb.in<std::int32_t>("DT");
	if (ms < 0)
		throw Error(fb.name() + ": negative DT");
	return from_ms(ms);
}

} // namespace

ERestart::ERestart(std::string instance)
	: FunctionBlock(std::move(instance), "E_RESTART", InterfaceDecl().out_event("COLD").out_event("WARM").out_event("STOP"))
{
}

void ERestart::on_start(EventContext &ctx)
{
	ctx.schedule(started_ ? "WARM" : "COLD", 0);
	started_ = true;
}

void ERestart::on_internal(std::string_view tag, std::span<const DataValue>, EventContext &ctx)
{
	ctx.emit(tag);
}

EDelay::EDelay(std::string instance)
	: FunctionBlock(std::move(instance), "E_DELAY",
	                InterfaceDecl().in_event("START", {"DT"}).in_event("STOP").out_event("EO").in_data("DT", 0))
{
}

void EDelay::on_event(std::string_view event, EventContext &ctx)
{
	if (event == "START") {
		if (!pending_)
			pending_ = ctx.schedule("EXPIRE", delay_of(*this));
	} else if (pending_) {
		ctx.cancel(*pending_);
		pending_.reset();
	}
}

void EDelay::on_internal(std::string_view, std::span<const DataValue>, EventContext &ctx)
{
	pending_.reset();
	ctx.emit("EO");
}

ECycle::ECycle(std::string instance)
	: FunctionBlock(std::move(instance), "E_CYCLE",
	                InterfaceDecl().in_event("START", {"DT"}).in_event("STOP").out_event("EO").in_data("DT", 0))
{
}

void ECycle::on_event(std::string_view event, EventContext &ctx)
{
	if (event == "START") {
		if (!pending_) {
			if (delay_of(*this) <= 0)
				throw Error(name() + ": DT must be positive");
			pending_ = ctx.schedule("TICK", delay_of(*this));
		}
	} else if (pending_) {
		ctx.cancel(*pending_);
		pending_.reset();
	}
}

void ECycle::on_internal(std::string_view, std::span<const DataValue>, EventContext &ctx)
{
	pending_ = ctx.schedule("TICK", delay_of(*this));
	ctx.emit("EO");
}

ESplit::ESplit(std::string instance)
	: FunctionBlock(std::move(instance), "E_SPLIT", InterfaceDecl().in_event("EI").out_event("EO1").out_event("EO2"))
{
}

void ESplit::on_event(std::string_view, EventContext &ctx)
{
	ctx.emit("EO1");
	ctx.emit("EO2");
}

EMerge::EMerge(std::string instance)
	: FunctionBlock(std::move(instance), "E_MERGE", InterfaceDecl().in_event("EI1").in_event("EI2").out_event("EO"))
{
}

void EMerge::on_event(std::string_view, EventContext &ctx)
{
	ctx.emit("EO");
}

ECtu::ECtu(std::string instance)
	: FunctionBlock(std::move(instance), "E_CTU",
	                InterfaceDecl()
	                    .in_event("CU", {"PV"})
	                    .in_event("R")
	                    .out_event("CUO", {"Q", "CV"})
	                    .out_event("RO", {"Q", "CV"})
	                    .in_data("PV", 0)
	                    .out_data("Q", false)
	                    .out_data("CV", 0))
{
}

void ECtu::on_event(std::string_view event, EventContext &ctx)
{
	auto cv = event == "CU" ? out<std::int32_t>("CV") + 1 : 0;
	set_output("CV", cv);
	set_output("Q", cv >= in<std::int32_t>("PV"));
	ctx.emit(event == "CU" ? "CUO" : "RO");
}

Publish::Publish(std::string instance, std::string topic, std::vector<ValueType> types)
	: FunctionBlock(std::move(instance), "PUBLISH", channel_interface(types, true)), topic_(std::move(topic)),
	  types_(std::move(types))
{
}

void Publish::on_start(EventContext &ctx)
{
	ctx.system().topics().declare(topic_, types_);
}

void Publish::on_event(std::string_view, EventContext &ctx)
{
	std::vector<DataValue> values;
	for (const auto &p : iface_.data_inputs)
		values.push_back(p.value);
	ctx.system().topics().publish(ctx.system(), topic_, std::move(values), ctx.now());
	ctx.emit("CNF");
}

Subscribe::Subscribe(std::string instance, std::string topic, std::vector<ValueType> types)
	: FunctionBlock(std::move(instance), "SUBSCRIBE", channel_interface(types, false)), topic_(std::move(topic)),
	  types_(std::move(types))
{
}

void Subscribe::on_start(EventContext &ctx)
{
	ctx.system().topics().declare(topic_, types_);
	ctx.system().topics().subscribe(topic_, ctx.resource(), ctx.index());
}

void Subscribe::on_internal(std::string_view, std::span<const DataValue> payload, EventContext &ctx)
{
	for (std::size_t i = 0; i < payload.size(); ++i)
		set_output(iface_.data_outputs[i].name, payload[i]);
	ctx.emit("IND");
}

void register_std_blocks(TypeRegistry &r)
{
	r.add_factory("E_RESTART", [](const std::string &n, const nlohmann::json &) { return std::make_unique<ERestart>(n); });
	r.add_factory("E_DELAY", [](const std::string &n, const nlohmann::json &p) {
		auto fb = std::make_unique<EDelay>(n);
		apply_input_parameters(*fb, p);
		return fb;
	});
	r.add_factory("E_CYCLE", [](const std::string &n, const nlohmann::json &p) {
		auto fb = std::make_unique<ECycle>(n);
		apply_input_parameters(*fb, p);
		return fb;
	});
	r.add_factory("E_SPLIT", [](const std::string &n, const nlohmann::json &) { return std::make_unique<ESplit>(n); });
	r.add_factory("E_MERGE", [](const std::string &n, const nlohmann::json &) { return std::make_unique<EMerge>(n); });
	r.add_factory("E_CTU", [](const std::string &n, const nlohmann::json &p) {
		auto fb = std::make_unique<ECtu>(n);
		apply_input_parameters(*fb, p);
		return fb;
	});
	r.add_factory("PUBLISH", [](const std::string &n, const nlohmann::json &p) {
		auto types = topic_types(n, p);
		return std::make_unique<Publish>(n, p["topic"].get<std::string>(), std::move(types));
	});
	r.add_factory("SUBSCRIBE", [](const std::string &n, const nlohmann::json &p) {
		auto types = topic_types(n, p);
		return std::make_unique<Subscribe>(n, p["topic"].get<std::string>(), std::move(types));
	});
}

} // namespace fbsas::fb

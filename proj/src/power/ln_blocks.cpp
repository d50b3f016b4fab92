#include "fbsas/power/ln_blocks.hpp"

#include "fbsas/fb/registry.hpp"
#include "fbsas/fb/system.hpp"

namespace fbsas::power {

namespace {

Enumerated dbpos(std::string_view v) { return make_enum("Dbpos", v); }

bool is_pos(const DataValue &v, std::string_view name) { return std::get<Enumerated>(v).value == name; }

} // namespace

void validate(const PtocSettings &s)
{
	if (!(s.pickup > 0.0))
		throw Error("PTOC pickup must be positive");
	if (s.operate_delay_ms < 0)
		throw Error("PTOC operate delay must not be negative");
}

void validate(const BreakerSettings &s)
{
	if (s.open_ms <= 0 || s.close_ms <= 0)
		throw Error("breaker open and close times must be positive");
}

void validate(const RecloserSettings &s)
{
	if (s.dead_time_ms <= 0 || s.reclaim_time_ms <= 0)
		throw Error("recloser dead and reclaim times must be positive");
	if (s.max_shots < 0)
		throw Error("recloser shot limit must not be negative");
}

LnBlock::LnBlock(std::string instance, std::string type, fb::InterfaceDecl iface, ln::DataModel &model, std::string ld,
                 std::string ln, std::string_view ln_class, bool require_node)
	: FunctionBlock(std::move(instance), std::move(type), std::move(iface)), model_(model), ld_(std::move(ld)),
	  ln_(std::move(ln))
{
	const auto *dev = model_.find_ld(ld_);
	const auto *node = dev ? dev->find(ln_) : nullptr;
	if (!node) {
		if (require_node)
			throw Error(name() + ": logical node " + ld_ + "/" + ln_ + " is not in the data model");
		bound_ = false;
		return;
	}
	if (node->name.ln_class != ln_class)
		throw Error(name() + ": " + ln_ + " is not a " + std::string(ln_class));
}

ln::ObjectReference LnBlock::ref(std::string_view data_object) const
{
	if (!bound_)
		throw Error(name() + ": logical node " + ld_ + "/" + ln_ + " is not in the data model");
	const auto *obj = model_.find_ld(ld_)->find(ln_)->find(data_object);
	return {ld_, ln_, std::string(data_object), std::string(ln::value_attribute(obj->cdc))};
}

const DataValue &LnBlock::read(std::string_view data_object) const
{
	if (!bound_)
		throw Error(name() + ": logical node " + ld_ + "/" + ln_ + " is not in the data model");
	return model_.find_ld(ld_)->find(ln_)->find(data_object)->value;
}

void LnBlock::write(std::string_view data_object, DataValue value, fb::EventContext &ctx)
{
	model_.update_attribute(ref(data_object), value, ctx.now());
}

TctrBlock::TctrBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, bool require_node)
	: LnBlock(std::move(instance), "TCTR_MFB",
	          fb::InterfaceDecl().in_event("SAMPLE", {"AMP"}).out_event("CNF", {"AMP_OUT"}).in_data("AMP", 0.0).out_data(
			          "AMP_OUT", 0.0),
	          model, std::move(ld), std::move(ln), "TCTR", require_node)
{
}

void TctrBlock::on_event(std::string_view, fb::EventContext &ctx)
{
	auto amp = in<double>("AMP");
	write("Amp", amp, ctx);
	set_output("AMP_OUT", amp);
	ctx.emit("CNF");
}

PtocBlock::PtocBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, PtocSettings settings, bool require_node)
	: LnBlock(std::move(instance), "PTOC_MFB",
	          fb::InterfaceDecl()
	              .in_event("SAMPLE", {"AMP"})
	              .out_event("CHG", {"OP"})
	              .in_data("AMP", 0.0)
	              .out_data("OP", false),
	          model, std::move(ld), std::move(ln), "PTOC", require_node),
	  settings_(settings)
{
	validate(settings_);
}

void PtocBlock::on_event(std::string_view, fb::EventContext &ctx)
{
	const bool above = in<double>("AMP") > settings_.pickup;
	const bool started = std::get<bool>(read("Str"));
	if (above && !started) {
		write("Str", true, ctx);
		timer_ = ctx.schedule("OPERATE", from_ms(settings_.operate_delay_ms));
	} else if (!above && started) {
		write("Str", false, ctx);
		if (timer_) {
			ctx.cancel(*timer_);
			timer_.reset();
		}
		if (std::get<bool>(read("Op"))) {
			write("Op", false, ctx);
			set_output("OP", false);
			ctx.emit("CHG");
		}
	}
}

void PtocBlock::on_internal(std::string_view, std::span<const DataValue>, fb::EventContext &ctx)
{
	timer_.reset();
	write("Op", true, ctx);
	set_output("OP", true);
	ctx.emit("CHG");
}

PtrcBlock::PtrcBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, bool require_node)
	: LnBlock(std::move(instance), "PTRC_MFB",
	          fb::InterfaceDecl()
	              .in_event("OPERATE", {"OP"})
	              .in_event("POSITION", {"POS"})
	              .out_event("CHG", {"TR"})
	              .in_data("OP", false)
	              .in_data("POS", dbpos("off"))
	              .out_data("TR", false),
	          model, std::move(ld), std::move(ln), "PTRC", require_node)
{
}

void PtrcBlock::on_event(std::string_view event, fb::EventContext &ctx)
{
	const bool tripped = std::get<bool>(read("Tr"));
	if (event == "OPERATE" && in<bool>("OP") && !tripped) {
		write("Tr", true, ctx);
	} else if (event == "POSITION" && tripped && is_pos(input("POS"), "off")) {
		write("Tr", false, ctx);
	} else {
		return;
	}
	set_output("TR", read("Tr"));
	ctx.emit("CHG");
}

XcbrBlock::XcbrBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, BreakerSettings settings, bool require_node)
	: LnBlock(std::move(instance), "XCBR_MFB",
	          fb::InterfaceDecl()
	              .in_event("TRIP", {"TR"})
	              .in_event("CLOSE", {"OP"})
	              .out_event("CHG", {"POS"})
	              .in_data("TR", false)
	              .in_data("OP", false)
	              .out_data("POS", dbpos("off")),
	          model, std::move(ld), std::move(ln), "XCBR", require_node),
	  settings_(settings)
{
	validate(settings_);
}

void XcbrBlock::on_start(fb::EventContext &ctx)
{
	set_output("POS", read("Pos"));
	ctx.emit("CHG");
}

void XcbrBlock::on_stop()
{
	timer_.reset();
	transit_ = Transit::none;
}

void XcbrBlock::set_position(const char *pos, fb::EventContext &ctx)
{
	write("Pos", dbpos(pos), ctx);
	set_output("POS", dbpos(pos));
	ctx.emit("CHG");
}

void XcbrBlock::on_event(std::string_view event, fb::EventContext &ctx)
{
	const auto &pos = read("Pos");
	if (event == "TRIP") {
		if (!in<bool>("TR") || transit_ == Transit::opening)
			return;
		if (transit_ == Transit::closing) {
			ctx.cancel(*timer_);
		} else if (is_pos(pos, "off")) {
			return;
		} else {
			set_position("intermediate", ctx);
		}
		transit_ = Transit::opening;
		timer_ = ctx.schedule("OPENED", from_ms(settings_.open_ms));
	} else if (event == "CLOSE") {
		if (!in<bool>("OP") || transit_ != Transit::none || !is_pos(pos, "off"))
			return;
		set_position("intermediate", ctx);
		transit_ = Transit::closing;
		timer_ = ctx.schedule("CLOSED", from_ms(settings_.close_ms));
	}
}

void XcbrBlock::on_internal(std::string_view tag, std::span<const DataValue>, fb::EventContext &ctx)
{
	timer_.reset();
	transit_ = Transit::none;
	set_position(tag == "OPENED" ? "off" : "on", ctx);
}

std::string_view to_string(RecloserMode mode)
{
	switch (mode) {
	case RecloserMode::idle: return "idle";
	case RecloserMode::waiting_dead_time: return "waiting_dead_time";
	case RecloserMode::reclaiming: return "reclaiming";
	case RecloserMode::locked_out: return "locked_out";
	}
	return "?";
}

nlohmann::ordered_json to_json(const RecloserState &s)
{
	return {{"mode", to_string(s.mode)},
	        {"shot_count", s.shot_count},
	        {"locked_out", s.mode == RecloserMode::locked_out},
	        {"blocked", s.blocked}};
}

RrecBlock::RrecBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln,
                     RecloserSettings settings, bool require_node)
	: LnBlock(std::move(instance), "RREC_MFB",
	          fb::InterfaceDecl()
	              .in_event("TRIP", {"TR"})
	              .in_event("POSITION", {"POS"})
	              .in_event("SET_BlkRec", {"BlkRec"})
	              .out_event("CHG", {"OP"})
	              .in_data("TR", false)
	              .in_data("POS", dbpos("off"))
	              .in_data("BlkRec", false)
	              .out_data("OP", false),
	          model, std::move(ld), std::move(ln), "RREC", require_node),
	  settings_(settings)
{
	validate(settings_);
	state_.blocked = bound() && std::get<bool>(read("BlkRec"));
}

void RrecBlock::on_start(fb::EventContext &ctx)
{
	publish_state(ctx);
}

void RrecBlock::on_stop()
{
	timer_.reset();
}

void RrecBlock::cancel_timer(fb::EventContext &ctx)
{
	if (timer_) {
		ctx.cancel(*timer_);
		timer_.reset();
	}
}

void RrecBlock::publish_state(fb::EventContext &ctx)
{
	if (traced_once_ && traced_ == state_)
		return;
	traced_once_ = true;
	traced_ = state_;
	auto payload = to_json(state_);
	payload["ln"] = ld() + "/" + ln();
	ctx.system().trace({ctx.now(), ctx.resource().path() + "/" + name(), "state", std::move(payload)});
}

void RrecBlock::on_event(std::string_view event, fb::EventContext &ctx)
{
	if (event == "SET_BlkRec") {
		const bool block = in<bool>("BlkRec");
		write("BlkRec", block, ctx);
		state_.blocked = block;
		if (block) {
			cancel_timer(ctx);
			if (state_.mode != RecloserMode::locked_out)
				state_.mode = RecloserMode::idle;
		} else if (state_.mode == RecloserMode::locked_out) {
			state_.mode = RecloserMode::idle;
			state_.shot_count = 0;
		}
		state_.trip_seen = false;
		publish_state(ctx);
		return;
	}

	if (event == "POSITION" && is_pos(input("POS"), "on") && std::get<bool>(read("Op"))) {
		write("Op", false, ctx);
		set_output("OP", false);
		ctx.emit("CHG");
	}
	if (state_.blocked || state_.mode == RecloserMode::locked_out)
		return;

	if (event == "TRIP" && in<bool>("TR")) {
		state_.trip_seen = true;
		if (state_.mode == RecloserMode::reclaiming) {
			cancel_timer(ctx);
			if (state_.shot_count >= settings_.max_shots) {
				state_.mode = RecloserMode::locked_out;
				write("BlkRec", true, ctx);
			} else {
				state_.mode = RecloserMode::idle;
			}
		}
	} else if (event == "POSITION" && is_pos(input("POS"), "off") && state_.trip_seen) {
		state_.trip_seen = false;
		if (state_.mode == RecloserMode::idle) {
			if (state_.shot_count < settings_.max_shots) {
				state_.mode = RecloserMode::waiting_dead_time;
				timer_ = ctx.schedule("DEAD", from_ms(settings_.dead_time_ms));
			} else {
				state_.mode = RecloserMode::locked_out;
				write("BlkRec", true, ctx);
			}
		}
	}
	publish_state(ctx);
}

void RrecBlock::on_internal(std::string_view tag, std::span<const DataValue>, fb::EventContext &ctx)
{
	timer_.reset();
	if (tag == "DEAD") {
		++state_.shot_count;
		state_.mode = RecloserMode::reclaiming;
		timer_ = ctx.schedule("RECLAIM", from_ms(settings_.reclaim_time_ms));
		write("Op", true, ctx);
		set_output("OP", true);
		ctx.emit("CHG");
	} else {
		state_.mode = RecloserMode::idle;
		state_.shot_count = 0;
	}
	publish_state(ctx);
}

void register_ln_blocks(fb::TypeRegistry &registry, ModelLookup models, bool require_nodes)
{
	struct Node {
		ln::DataModel *model;
		std::string ld;
		std::string ln;
	};
	auto node = [models](const std::string &instance, const nlohmann::json &p) {
		for (const char *key : {"ied", "ld", "ln"})
			if (!p.contains(key) || !p[key].is_string())
				throw Error(instance + ": parameter '" + key + "' (string) is required");
		return Node {&models(p["ied"].get<std::string>()), p["ld"].get<std::string>(), p["ln"].get<std::string>()};
	};
	auto num = [](const nlohmann::json &p, const char *key, auto fallback) {
		return p.contains(key) ? p[key].get<decltype(fallback)>() : fallback;
	};

	registry.add_factory("TCTR_MFB", [node, require_nodes](const std::string &n, const nlohmann::json &p) {
		auto x = node(n, p);
		return std::make_unique<TctrBlock>(n, *x.model, x.ld, x.ln, require_nodes);
	});
	registry.add_factory("PTOC_MFB", [node, num, require_nodes](const std::string &n, const nlohmann::json &p) {
		auto x = node(n, p);
		PtocSettings s;
		s.pickup = num(p, "pickup", s.pickup);
		s.operate_delay_ms = num(p, "operate_delay_ms", s.operate_delay_ms);
		return std::make_unique<PtocBlock>(n, *x.model, x.ld, x.ln, s, require_nodes);
	});
	registry.add_factory("PTRC_MFB", [node, require_nodes](const std::string &n, const nlohmann::json &p) {
		auto x = node(n, p);
		return std::make_unique<PtrcBlock>(n, *x.model, x.ld, x.ln, require_nodes);
	});
	registry.add_factory("XCBR_MFB", [node, num, require_nodes](const std::string &n, const nlohmann::json &p) {
		auto x = node(n, p);
		BreakerSettings s;
		s.open_ms = num(p, "open_ms", s.open_ms);
		s.close_ms = num(p, "close_ms", s.close_ms);
		return std::make_unique<XcbrBlock>(n, *x.model, x.ld, x.ln, s, require_nodes);
	});
	registry.add_factory("RREC_MFB", [node, num, require_nodes](const std::string &n, const nlohmann::json &p) {
		auto x = node(n, p);
		RecloserSettings s;
		s.dead_time_ms = num(p, "dead_time_ms", s.dead_time_ms);
		s.reclaim_time_ms = num(p, "reclaim_time_ms", s.reclaim_time_ms);
		s.max_shots = num(p, "max_shots", s.max_shots);
		return std::make_unique<RrecBlock>(n, *x.model, x.ld, x.ln, s, require_nodes);
	});
}

} // namespace fbsas::power

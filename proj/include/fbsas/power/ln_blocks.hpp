#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "fbsas/fb/function_block.hpp"
#include "fbsas/ln/model.hpp"
#include "fbsas/power/settings.hpp"

namespace fbsas::fb {
class TypeRegistry;
}

namespace fbsas::power {

/// Main function block of a logical node: owns the node's behavior and writes its data
/// objects in the IED data model.
class LnBlock : public fb::FunctionBlock {
public:
	const std::string &ld() const { return ld_; }
	const std::string &ln() const { return ln_; }
	/// False when the node was absent from the model at construction (lenient loading).
	bool bound() const { return bound_; }

protected:
	LnBlock(std::string instance, std::string type, fb::InterfaceDecl iface, ln::DataModel &model, std::string ld,
	        std::string ln, std::string_view ln_class, bool require_node);

	const DataValue &read(std::string_view data_object) const;
	/// Writes the value attribute of a data object at the current time.
	void write(std::string_view data_object, DataValue value, fb::EventContext &ctx);

	ln::DataModel &model_;

private:
	ln::ObjectReference ref(std::string_view data_object) const;

	std::string ld_;
	std::string ln_;
	bool bound_ = true;
};

/// TCTR_MFB: SAMPLE (WITH AMP) stores Amp.mag and forwards the sample on CNF.
class TctrBlock : public LnBlock {
public:
	TctrBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, bool require_node = true);
	void on_event(std::string_view event, fb::EventContext &ctx) override;
};

/// PTOC_MFB: definite-time overcurrent. Str follows every sample (strictly above pickup);
/// Op is raised once Str has held for the operate delay and drops with Str. CHG (WITH OP)
/// carries each Op change.
class PtocBlock : public LnBlock {
public:
	PtocBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, PtocSettings settings, bool require_node = true);
	void on_event(std::string_view event, fb::EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue> payload, fb::EventContext &ctx) override;
	void on_stop() override { timer_.reset(); }

private:
	PtocSettings settings_;
	std::optional<fb::TimerId> timer_;
};

/// PTRC_MFB: OPERATE (WITH OP) true raises Tr.general; POSITION (WITH POS) off clears it.
/// CHG carries each Tr change.
class PtrcBlock : public LnBlock {
public:
	PtrcBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, bool require_node = true);
	void on_event(std::string_view event, fb::EventContext &ctx) override;
};

enum class Transit { none, opening, closing };

/// XCBR_MFB: TRIP (WITH TR) and CLOSE (WITH OP) drive the position through intermediate
/// to off or on after the mechanical delay. A trip during closing turns the transit into
/// an opening; a trip while open and a close while not open are ignored. CHG (WITH POS)
/// carries every position change, and the initial position at start.
class XcbrBlock : public LnBlock {
public:
	XcbrBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, BreakerSettings settings, bool require_node = true);
	void on_event(std::string_view event, fb::EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue> payload, fb::EventContext &ctx) override;
	void on_start(fb::EventContext &ctx) override;
	void on_stop() override;

	Transit transit() const { return transit_; }

private:
	void set_position(const char *pos, fb::EventContext &ctx);

	BreakerSettings settings_;
	Transit transit_ = Transit::none;
	std::optional<fb::TimerId> timer_;
};

enum class RecloserMode { idle, waiting_dead_time, reclaiming, locked_out };
std::string_view to_string(RecloserMode mode);

struct RecloserState {
	RecloserMode mode = RecloserMode::idle;
	int shot_count = 0;
	bool trip_seen = false;
	bool blocked = false;

	friend bool operator==(const RecloserState &, const RecloserState &) = default;
};

nlohmann::ordered_json to_json(const RecloserState &s);

/// RREC_MFB: auto-reclose sequence.
///  - A trip followed by the breaker opening starts the dead time (if shots remain).
///  - Dead time expiry raises Op.general (the close command), counts a shot and starts
///    the reclaim time. Op drops when the breaker reports on.
///  - Reclaim expiry resets the shot count.
///  - A trip during reclaim with every shot used locks out and sets BlkRec.
///  - Inputs are TRIP (WITH TR), POSITION (WITH POS) and SET_BlkRec (WITH BlkRec);
///    CHG (WITH OP) carries each Op change.
///  - SET_BlkRec writes BlkRec; true suspends reclosing, false clears a lockout.
/// Each state change is traced as a "state" record.
class RrecBlock : public LnBlock {
public:
	RrecBlock(std::string instance, ln::DataModel &model, std::string ld, std::string ln, RecloserSettings settings, bool require_node = true);
	void on_event(std::string_view event, fb::EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue> payload, fb::EventContext &ctx) override;
	void on_start(fb::EventContext &ctx) override;
	void on_stop() override;

	const RecloserState &state() const { return state_; }

private:
	void cancel_timer(fb::EventContext &ctx);
	void publish_state(fb::EventContext &ctx);

	RecloserSettings settings_;
	RecloserState state_;
	RecloserState traced_;
	bool traced_once_ = false;
	std::optional<fb::TimerId> timer_;
};

using ModelLookup = std::function<ln::DataModel &(const std::string &ied)>;

/// Registers TCTR_MFB, PTOC_MFB, PTRC_MFB, XCBR_MFB and RREC_MFB. Parameters name the
/// node ({"ied", "ld", "ln"}) plus the class settings: pickup/operate_delay_ms,
/// open_ms/close_ms, dead_time_ms/reclaim_time_ms/max_shots. With require_nodes false a
/// node missing from the model loads unbound and fails on first use.
void register_ln_blocks(fb::TypeRegistry &registry, ModelLookup models, bool require_nodes = true);

} // namespace fbsas::power

#pragma once

// Flat reference model of the feeder protection scenario. It shares no code with the
// function block runtime: every protection function is a plain state machine and all
// communication is modelled by its hop count through one (time, seq) event queue.
//   topic publication: 1 hop
//   GOOSE: change -> publisher check (1), transport (2), per-subscriber delivery (3)
// Timers and hops at equal times run in the order they were queued.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Settings {
	double pickup = 400.0;
	std::int64_t operate_ms = 50;
	std::int64_t open_ms = 40;
	std::int64_t close_ms = 60;
	std::int64_t dead_ms = 500;
	std::int64_t reclaim_ms = 2000;
	int max_shots = 3;
	std::int64_t sample_ms = 10;
};

enum class Kind { set_load, set_fault, clear_fault, open_disc, close_disc };

struct Action {
	std::int64_t at_ms = 0;
	Kind kind = Kind::set_load;
	double amps = 0.0;
};

struct Point {
	std::string pos;
	int shot = 0;
	bool locked_out = false;

	friend bool operator==(const Point &, const Point &) = default;
};

struct Result {
	std::vector<Point> timeline; ///< state at the end of each ms, index = ms
	int trips = 0;
	int recloses = 0;
};

class Feeder {
public:
	explicit Feeder(Settings s) : s_(s) {}

	Result run(std::vector<Action> actions, std::int64_t horizon_ms)
	{
		std::stable_sort(actions.begin(), actions.end(), [](auto &a, auto &b) { return a.at_ms < b.at_ms; });
		at(s_.sample_ms, [this] { tick(); });
		auto next = actions.begin();
		for (now_ = 0; now_ < horizon_ms; ++now_) {
			drain();
			for (; next != actions.end() && next->at_ms == now_; ++next)
				act(*next);
			result_.timeline.push_back({pos_, shot_, mode_ == Mode::locked});
		}
		now_ = horizon_ms;
		drain();
		result_.timeline.push_back({pos_, shot_, mode_ == Mode::locked});
		return result_;
	}

private:
	enum class Transit { none, opening, closing };
	enum class Mode { idle, dead, reclaim, locked };

	struct Item {
		std::int64_t t;
		std::uint64_t seq;
		std::function<void()> fn;
		bool operator>(const Item &o) const { return t != o.t ? t > o.t : seq > o.seq; }
	};

	struct Publisher {
		bool pending = false;
		std::optional<std::vector<std::string>> last;
		std::function<std::vector<std::string>()> snapshot;
		std::vector<std::function<void(const std::vector<std::string> &)>> subscribers;
	};

	std::uint64_t at(std::int64_t t, std::function<void()> fn)
	{
		queue_.push({t, ++seq_, std::move(fn)});
		return seq_;
	}
	void cancel(std::optional<std::uint64_t> &id)
	{
		if (id)
			cancelled_.insert(*id);
		id.reset();
	}
	void drain()
	{
		while (!queue_.empty() && queue_.top().t <= now_) {
			auto item = queue_.top();
			queue_.pop();
			if (cancelled_.erase(item.seq))
				continue;
			item.fn();
		}
	}

	void changed(Publisher &p)
	{
		if (p.pending)
			return;
		p.pending = true;
		at(now_, [this, &p] {
			p.pending = false;
			auto snap = p.snapshot();
			if (p.last == snap)
				return;
			p.last = snap;
			at(now_, [this, &p, snap] {
				for (auto &sub : p.subscribers)
					at(now_, [sub, snap] { sub(snap); });
			});
		});
	}

	void act(const Action &a)
	{
		switch (a.kind) {
		case Kind::set_load: load_ = a.amps; break;
		case Kind::set_fault: fault_ = a.amps; break;
		case Kind::clear_fault: fault_.reset(); break;
		case Kind::open_disc: disc_closed_ = false; break;
		case Kind::close_disc: disc_closed_ = true; break;
		}
	}

	// plant CT, then TCTR and PTOC one topic hop apart each
	void tick()
	{
		at(now_ + s_.sample_ms, [this] { tick(); });
		double amp = disc_closed_ && conducting_ ? std::max(load_, fault_.value_or(0.0)) : 0.0;
		at(now_, [this, amp] { at(now_, [this, amp] { ptoc_sample(amp); }); });
	}

	void ptoc_sample(double amp)
	{
		const bool above = amp > s_.pickup;
		if (above && !str_) {
			str_ = true;
			op_timer_ = at(now_ + s_.operate_ms, [this] {
				op_timer_.reset();
				op_ = true;
				at(now_, [this] { ptrc_operate(true); });
			});
		} else if (!above && str_) {
			str_ = false;
			cancel(op_timer_);
			if (op_) {
				op_ = false;
				at(now_, [this] { ptrc_operate(false); });
			}
		}
	}

	void ptrc_operate(bool op)
	{
		if (op && !tr_) {
			tr_ = true;
			++result_.trips;
			changed(trip_go_);
		}
	}
	void ptrc_position(const std::string &pos)
	{
		if (tr_ && pos == "off") {
			tr_ = false;
			changed(trip_go_);
		}
	}

	void set_pos(const char *p)
	{
		if (pos_ != p) {
			pos_ = p;
			changed(pos_go_);
		}
		std::string v = p;
		at(now_, [this, v] { conducting_ = v == "on"; });
	}
	void xcbr_trip(bool tr)
	{
		if (!tr || transit_ == Transit::opening)
			return;
		if (transit_ == Transit::closing)
			cancel(brk_timer_);
		else if (pos_ == "off")
			return;
		else
			set_pos("intermediate");
		transit_ = Transit::opening;
		brk_timer_ = at(now_ + s_.open_ms, [this] {
			brk_timer_.reset();
			transit_ = Transit::none;
			set_pos("off");
		});
	}
	void xcbr_close(bool op)
	{
		if (!op || transit_ != Transit::none || pos_ != "off")
			return;
		set_pos("intermediate");
		transit_ = Transit::closing;
		brk_timer_ = at(now_ + s_.close_ms, [this] {
			brk_timer_.reset();
			transit_ = Transit::none;
			set_pos("on");
		});
	}

	void lockout()
	{
		mode_ = Mode::locked;
		blk_rec_ = true;
		changed(rec_go_);
	}
	void rrec_trip(bool tr)
	{
		if (mode_ == Mode::locked || !tr)
			return;
		trip_seen_ = true;
		if (mode_ == Mode::reclaim) {
			cancel(rec_timer_);
			if (shot_ >= s_.max_shots)
				lockout();
			else
				mode_ = Mode::idle;
		}
	}
	void rrec_position(const std::string &p)
	{
		if (p == "on" && rec_op_) {
			rec_op_ = false;
			changed(rec_go_);
		}
		if (mode_ == Mode::locked || p != "off" || !trip_seen_)
			return;
		trip_seen_ = false;
		if (mode_ != Mode::idle)
			return;
		if (shot_ >= s_.max_shots) {
			lockout();
			return;
		}
		mode_ = Mode::dead;
		rec_timer_ = at(now_ + s_.dead_ms, [this] {
			rec_timer_.reset();
			++shot_;
			mode_ = Mode::reclaim;
			rec_timer_ = at(now_ + s_.reclaim_ms, [this] {
				rec_timer_.reset();
				mode_ = Mode::idle;
				shot_ = 0;
			});
			rec_op_ = true;
			++result_.recloses;
			changed(rec_go_);
		});
	}

	Settings s_;
	std::int64_t now_ = 0;
	std::uint64_t seq_ = 0;
	std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
	std::set<std::uint64_t> cancelled_;
	Result result_;

	double load_ = 0.0;
	std::optional<double> fault_;
	bool disc_closed_ = true;
	bool conducting_ = true;

	bool str_ = false, op_ = false;
	std::optional<std::uint64_t> op_timer_;
	bool tr_ = false;

	std::string pos_ = "on";
	Transit transit_ = Transit::none;
	std::optional<std::uint64_t> brk_timer_;

	Mode mode_ = Mode::idle;
	int shot_ = 0;
	bool trip_seen_ = false;
	bool rec_op_ = false;
	bool blk_rec_ = false;
	std::optional<std::uint64_t> rec_timer_;

	// subscription order: PTRC position, RREC trip, RREC position, XCBR trip, XCBR close
	Publisher trip_go_ {false, {}, [this] { return std::vector<std::string> {tr_ ? "1" : "0"}; },
	                    {[this](auto &d) { rrec_trip(d[0] == "1"); }, [this](auto &d) { xcbr_trip(d[0] == "1"); }}};
	Publisher rec_go_ {false, {}, [this] { return std::vector<std::string> {rec_op_ ? "1" : "0", blk_rec_ ? "1" : "0"}; },
	                   {[this](auto &d) { xcbr_close(d[0] == "1"); }}};
	Publisher pos_go_ {false, {}, [this] { return std::vector<std::string> {pos_}; },
	                   {[this](auto &d) { ptrc_position(d[0]); }, [this](auto &d) { rrec_position(d[0]); }}};
};

inline Result simulate(const Settings &s, std::vector<Action> actions, std::int64_t horizon_ms)
{
	return Feeder(s).run(std::move(actions), horizon_ms);
}

} // namespace oracle

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbsas/fb/function_block.hpp"

namespace fbsas::fb {

class TypeRegistry;

/// Emits COLD once when its resource first starts and WARM on each later restart.
class ERestart : public FunctionBlock {
public:
	explicit ERestart(std::string instance);
	void on_event(std::string_view, EventContext &) override {}
	void on_internal(std::string_view tag, std::span<const DataValue>, EventContext &ctx) override;
	void on_start(EventContext &ctx) override;

private:
	bool started_ = false;
};

/// START (WITH DT, milliseconds) arms a one-shot timer that emits EO; STOP disarms it.
/// A START while armed is ignored.
class EDelay : public FunctionBlock {
public:
	explicit EDelay(std::string instance);
	void on_event(std::string_view event, EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue>, EventContext &ctx) override;
	void on_stop() override { pending_.reset(); }

	bool armed() const { return pending_.has_value(); }

private:
	std::optional<TimerId> pending_;
};

/// Emits EO every DT milliseconds between START and STOP.
class ECycle : public FunctionBlock {
public:
	explicit ECycle(std::string instance);
	void on_event(std::string_view event, EventContext &ctx) override;
	void on_internal(std::string_view tag, std::span<const DataValue>, EventContext &ctx) override;
	void on_stop() override { pending_.reset(); }

private:
	std::optional<TimerId> pending_;
};

class ESplit : public FunctionBlock {
public:
	explicit ESplit(std::string instance);
	void on_event(std::string_view event, EventContext &ctx) override;
};

class EMerge : public FunctionBlock {
public:
	explicit EMerge(std::string instance);
	void on_event(std::string_view event, EventContext &ctx) override;
};

/// Up counter: CU increments CV and emits CUO, R clears it and emits RO. Q = CV >= PV.
class ECtu : public FunctionBlock {
public:
	explicit ECtu(std::string instance);
	void on_event(std::string_view event, EventContext &ctx) override;
};

/// Publishes SD_1..SD_n on a topic bus channel at REQ, then emits CNF.
/// Parameters: {"topic": "...", "types": ["f64", ...]}.
class Publish : public FunctionBlock {
public:
	Publish(std::string instance, std::string topic, std::vector<ValueType> types);
	void on_event(std::string_view event, EventContext &ctx) override;
	void on_start(EventContext &ctx) override;

private:
	std::string topic_;
	std::vector<ValueType> types_;
};

/// Receives a topic into RD_1..RD_n and emits IND. Same parameters as Publish.
class Subscribe : public FunctionBlock {
public:
	Subscribe(std::string instance, std::string topic, std::vector<ValueType> types);
	void on_event(std::string_view, EventContext &) override {}
	void on_internal(std::string_view tag, std::span<const DataValue> payload, EventContext &ctx) override;
	void on_start(EventContext &ctx) override;

private:
	std::string topic_;
	std::vector<ValueType> types_;
};

/// Registers E_RESTART, E_DELAY, E_CYCLE, E_SPLIT, E_MERGE, E_CTU, PUBLISH, SUBSCRIBE.
void register_std_blocks(TypeRegistry &registry);

} // namespace fbsas::fb

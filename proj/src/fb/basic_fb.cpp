#include "fbsas/fb/basic_fb.hpp"

#include <algorithm>
#include <set>

namespace fbsas::fb {

void BasicFbType::validate() const
{
	iface.validate(type_name);

	std::set<std::string_view> names;
	for (const auto &s : ecc.states)
		if (!names.insert(s.name).second)
			throw Error(type_name + ": duplicate ECC state '" + s.name + "'");
	if (!names.contains(ecc.initial_state))
		throw Error(type_name + ": initial state '" + ecc.initial_state + "' is not declared");

	std::set<std::string_view> vars;
	for (const auto &p : iface.data_inputs) vars.insert(p.name);
	for (const auto &p : iface.data_outputs) vars.insert(p.name);
	for (const auto &p : internals) {
		if (!vars.insert(p.name).second)
			throw Error(type_name + ": internal variable '" + p.name + "' clashes with a port");
	}

	for (const auto &s : ecc.states) {
		for (const auto &a : s.actions) {
			if (!a.algorithm.empty() && !algorithms.contains(a.algorithm))
				throw Error(type_name + ": state " + s.name + " uses unknown algorithm '" + a.algorithm + "'");
			if (!a.output_event.empty() && !iface.event_output(a.output_event))
				throw Error(type_name + ": state " + s.name + " emits undeclared event '" + a.output_event + "'");
		}
	}

	for (const auto &t : ecc.transitions) {
		if (!names.contains(t.source))
			throw Error(type_name + ": transition from undeclared state '" + t.source + "'");
		if (!names.contains(t.target))
			throw Error(type_name + ": transition to undeclared state '" + t.target + "'");
		if (!t.trigger.empty() && !iface.event_input(t.trigger))
			throw Error(type_name + ": transition " + t.source + "->" + t.target + " on undeclared event '" +
			            t.trigger + "'");
		for (const auto &id : t.guard.identifiers())
			if (!vars.contains(id))
				throw Error(type_name + ": guard '" + t.guard.text() + "' references undeclared '" + id + "'");
	}
}

class BasicFunctionBlock::Access : public VarAccess {
public:
	explicit Access(BasicFunctionBlock &fb) : fb_(fb) {}

	const DataValue &get(std::string_view name) const override
	{
		if (const auto *v = fb_.lookup(name))
			return *v;
		throw Error(fb_.name() + ": algorithm reads unknown variable '" + std::string(name) + "'");
	}

	void set(std::string_view name, DataValue v) override
	{
		if (fb_.iface_.data_output(name)) {
			fb_.set_output(name, std::move(v));
			return;
		}
		for (auto &var : fb_.vars_) {
			if (var.name == name) {
				if (!same_type(var.value, v))
					throw TypeMismatch(fb_.name() + "." + var.name + ": expected " + fbsas::type_name(type_of(var.value)));
				var.value = std::move(v);
				return;
			}
		}
		if (fb_.iface_.data_input(name)) {
			fb_.set_input(name, std::move(v));
			return;
		}
		throw Error(fb_.name() + ": algorithm writes unknown variable '" + std::string(name) + "'");
	}

private:
	BasicFunctionBlock &fb_;
};

BasicFunctionBlock::BasicFunctionBlock(std::string instance_name, std::shared_ptr<const BasicFbType> type)
	: FunctionBlock(std::move(instance_name), type->type_name, type->iface), type_(std::move(type)),
	  vars_(type_->internals)
{
	const auto &states = type_->ecc.states;
	auto it = std::find_if(states.begin(), states.end(),
	                       [&](const EccState &s) { return s.name == type_->ecc.initial_state; });
	state_ = static_cast<std::size_t>(it - states.begin());
}

const DataValue *BasicFunctionBlock::lookup(std::string_view name) const
{
	if (const auto *p = iface_.data_input(name)) return &p->value;
	if (const auto *p = iface_.data_output(name)) return &p->value;
	for (const auto &v : vars_)
		if (v.name == name) return &v.value;
	return nullptr;
}

const std::string &BasicFunctionBlock::current_state() const
{
	return type_->ecc.states[state_].name;
}

const DataValue &BasicFunctionBlock::variable(std::string_view name) const
{
	if (const auto *v = lookup(name))
		return *v;
	throw Error(this->name() + ": no variable '" + std::string(name) + "'");
}

std::vector<std::string> BasicFunctionBlock::fire(std::string_view event)
{
	if (!iface_.event_input(event))
		throw Error(name() + ": '" + std::string(event) + "' is not an input event");

	const auto &ecc = type_->ecc;
	auto guard_lookup = [this](std::string_view n) { return lookup(n); };
	std::vector<std::string> outputs;
	Access access(*this);
	bool event_pending = true;
	int chained = 0;

	for (;;) {
		const EccTransition *taken = nullptr;
		const auto &current = ecc.states[state_].name;
		for (const auto &t : ecc.transitions) {
			if (t.source != current)
				continue;
			if (!t.trigger.empty() && (!event_pending || t.trigger != event))
				continue;
			if (t.guard.evaluate(guard_lookup)) {
				taken = &t;
				break;
			}
		}
		if (!taken)
			break;

		if (taken->trigger.empty() && ++chained > kEccChainLimit)
			throw EccLivelock(name() + ": more than " + std::to_string(kEccChainLimit) +
			                  " chained event-less transitions (stuck around state " + current + ")");
		event_pending = false;

		auto next = std::find_if(ecc.states.begin(), ecc.states.end(),
		                         [&](const EccState &s) { return s.name == taken->target; });
		state_ = static_cast<std::size_t>(next - ecc.states.begin());
		for (const auto &a : next->actions) {
			if (!a.algorithm.empty())
				type_->algorithms.find(a.algorithm)->second(access);
			if (!a.output_event.empty())
				outputs.push_back(a.output_event);
		}
	}
	return outputs;
}

void BasicFunctionBlock::on_event(std::string_view event, EventContext &ctx)
{
	for (const auto &out : fire(event))
		ctx.emit(out);
}

} // namespace fbsas::fb

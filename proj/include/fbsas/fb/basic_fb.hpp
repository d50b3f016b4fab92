#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fbsas/core/error.hpp"
#include "fbsas/fb/function_block.hpp"
#include "fbsas/fb/guard_expr.hpp"

namespace fbsas::fb {

/// Raised when one firing chains more than `kEccChainLimit` event-less transitions.
class EccLivelock : public Error {
public:
	using Error::Error;
};

inline constexpr int kEccChainLimit = 1000;

struct EccAction {
	std::string algorithm;    ///< empty: no algorithm
	std::string output_event; ///< empty: no event
};

struct EccState {
	std::string name;
	std::vector<EccAction> actions;
};

struct EccTransition {
	std::string source;
	std::string trigger; ///< empty: event-less transition
	GuardExpr guard;
	std::string target;
};

struct ExecutionControlChart {
	std::vector<EccState> states;
	std::string initial_state;
	std::vector<EccTransition> transitions;
};

/// Read/write view over a basic block's inputs, outputs and internal variables, handed to
/// algorithms. Writes are type-checked.
class VarAccess {
public:
	virtual ~VarAccess() = default;
	virtual const DataValue &get(std::string_view name) const = 0;
	virtual void set(std::string_view name, DataValue v) = 0;

	template <class T> const T &as(std::string_view name) const { return std::get<T>(get(name)); }
};

using Algorithm = std::function<void(VarAccess &)>;

struct BasicFbType {
	std::string type_name;
	InterfaceDecl iface;
	std::vector<DataPort> internals;
	ExecutionControlChart ecc;
	std::map<std::string, Algorithm, std::less<>> algorithms;

	/// Checks the ECC invariants: unique state names, a declared initial state, transitions
	/// between declared states on declared input events, guards naming declared variables,
	/// actions naming registered algorithms and declared output events.
	void validate() const;
};

class BasicFunctionBlock : public FunctionBlock {
public:
	BasicFunctionBlock(std::string instance_name, std::shared_ptr<const BasicFbType> type);

	/// Runs the ECC for one input event and returns the output events in emission order.
	std::vector<std::string> fire(std::string_view event);

	const std::string &current_state() const;
	const DataValue &variable(std::string_view name) const;

	void on_event(std::string_view event, EventContext &ctx) override;

private:
	class Access;
	const DataValue *lookup(std::string_view name) const;

	std::shared_ptr<const BasicFbType> type_;
	std::vector<DataPort> vars_;
	std::size_t state_ = 0;
};

} // namespace fbsas::fb

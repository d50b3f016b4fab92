#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fbsas/core/value.hpp"
#include "fbsas/ln/names.hpp"

namespace fbsas::ln {

enum class Cdc { SPS, DPC, MV, ACT };

std::string_view cdc_name(Cdc cdc);
std::optional<Cdc> parse_cdc(std::string_view text);
/// "stVal", "stVal", "mag" or "general".
std::string_view value_attribute(Cdc cdc);
ValueType value_type(Cdc cdc);

struct Quality {
	std::string validity = "good";
	std::string source = "process";

	friend bool operator==(const Quality &, const Quality &) = default;
};

nlohmann::ordered_json to_json(const Quality &q);

/// One data object. The value attribute, q and t always change together.
struct DataObject {
	std::string name;
	Cdc cdc = Cdc::SPS;
	DataValue value;
	Quality q;
	VirtualTime t = 0;
};

struct LogicalNode {
	LnName name;
	std::vector<DataObject> data_objects;
	/// Resource hosting the node's function block network; equals the rendered name.
	std::string host_resource;

	DataObject *find(std::string_view data_object);
	const DataObject *find(std::string_view data_object) const;
};

struct LogicalDevice {
	std::string name;
	std::vector<LogicalNode> logical_nodes; ///< LLN0 first

	LogicalNode *find(std::string_view ln);
	const LogicalNode *find(std::string_view ln) const;
	void add(LogicalNode node);
};

/// Builds a node with the mandatory data objects of its class and default values
/// (false, DPC off, 0.0, good/process quality, t = 0). Throws NameError for unsupported classes.
LogicalNode build_ln(std::string_view ln_class, int instance, std::string prefix = {});
LogicalDevice make_ld(std::string name);

/// The segment at which a reference failed to resolve.
enum class RefLevel { ld, ln, data_object, attribute };

class ResolveError : public Error {
public:
	ResolveError(RefLevel level, const std::string &message) : Error(message), level_(level) {}
	RefLevel level() const { return level_; }

private:
	RefLevel level_;
};

/// Value seen through one attribute. For "q" the value is the validity (enum Validity),
/// for "t" a timestamp; quality and time always describe the owning data object.
struct AttributeValue {
	DataValue value;
	Quality q;
	VirtualTime t = 0;

	friend bool operator==(const AttributeValue &, const AttributeValue &) = default;
};

struct ChangeRecord {
	ObjectReference ref;
	DataValue old_value;
	DataValue new_value;
	Quality q;
	VirtualTime at = 0;
};

nlohmann::ordered_json to_json(const ChangeRecord &c);

/// The logical devices of one IED plus change notification.
class DataModel {
public:
	using Listener = std::function<void(const ChangeRecord &)>;

	void add_ld(LogicalDevice ld);
	LogicalDevice *find_ld(std::string_view name);
	const LogicalDevice *find_ld(std::string_view name) const;
	const std::vector<LogicalDevice> &lds() const { return lds_; }

	AttributeValue resolve(const ObjectReference &ref) const;
	AttributeValue resolve(std::string_view ref) const { return resolve(ObjectReference::parse(ref)); }

	/// Writes an attribute. Equal values are a no-op (no record). Otherwise the data
	/// object's t becomes `at`, q is kept unless the attribute written is q itself, and a
	/// change record is returned and passed to every listener. Throws TypeMismatch,
	/// ResolveError, or Error when `at` precedes the object's current t.
	std::optional<ChangeRecord> update_attribute(const ObjectReference &ref, const DataValue &value, VirtualTime at);

	/// Applies a record as-is (used to replay a trace); does not notify listeners.
	void apply(const ChangeRecord &record);

	/// Every attribute reference, in model order.
	std::vector<ObjectReference> walk() const;

	void add_listener(Listener listener) { listeners_.push_back(std::move(listener)); }

private:
	const DataObject &locate(const ObjectReference &ref) const;
	DataObject &locate(const ObjectReference &ref);

	std::vector<LogicalDevice> lds_;
	std::vector<Listener> listeners_;
};

} // namespace fbsas::ln

#include "fbsas/ln/model.hpp"

#include <algorithm>

namespace fbsas::ln {

std::string_view cdc_name(Cdc cdc)
{
	switch (cdc) {
	case Cdc::SPS: return "SPS";
	case Cdc::DPC: return "DPC";
	case Cdc::MV: return "MV";
	case Cdc::ACT: return "ACT";
	}
	return "?";
}

std::optional<Cdc> parse_cdc(std::string_view text)
{
	for (auto c : {Cdc::SPS, Cdc::DPC, Cdc::MV, Cdc::ACT})
		if (cdc_name(c) == text)
			return c;
	return std::nullopt;
}

std::string_view value_attribute(Cdc cdc)
{
	switch (cdc) {
	case Cdc::MV: return "mag";
	case Cdc::ACT: return "general";
	default: return "stVal";
	}
}

ValueType value_type(Cdc cdc)
{
	switch (cdc) {
	case Cdc::DPC: return {ValueKind::enumeration, "Dbpos"};
	case Cdc::MV: return {ValueKind::float64, {}};
	default: return {ValueKind::boolean, {}};
	}
}

nlohmann::ordered_json to_json(const Quality &q)
{
	return {{"validity", q.validity}, {"source", q.source}};
}

nlohmann::ordered_json to_json(const ChangeRecord &c)
{
	nlohmann::ordered_json j;
	j["ref"] = c.ref.render();
	j["old"] = fbsas::to_json(c.old_value);
	j["new"] = fbsas::to_json(c.new_value);
	j["q"] = to_json(c.q);
	j["at"] = c.at;
	return j;
}

DataObject *LogicalNode::find(std::string_view data_object)
{
	for (auto &d : data_objects)
		if (d.name == data_object)
			return &d;
	return nullptr;
}

const DataObject *LogicalNode::find(std::string_view data_object) const
{
	return const_cast<LogicalNode *>(this)->find(data_object);
}

LogicalNode *LogicalDevice::find(std::string_view ln)
{
	for (auto &n : logical_nodes)
		if (n.name.render() == ln)
			return &n;
	return nullptr;
}

const LogicalNode *LogicalDevice::find(std::string_view ln) const
{
	return const_cast<LogicalDevice *>(this)->find(ln);
}

void LogicalDevice::add(LogicalNode node)
{
	if (find(node.name.render()))
		throw Error(name + ": duplicate logical node '" + node.name.render() + "'");
	logical_nodes.push_back(std::move(node));
}

LogicalNode build_ln(std::string_view ln_class, int instance, std::string prefix)
{
	if (!is_supported_class(ln_class))
		throw NameError("unsupported logical node class '" + std::string(ln_class) + "'");
	if (!prefix.empty() && !is_identifier(prefix))
		throw NameError("logical node prefix '" + prefix + "' is not an identifier");

	LogicalNode ln;
	if (ln_class == "LLN0") {
		ln.name = {"", "LLN0", 0};
	} else {
		if (instance <= 0)
			throw NameError("logical node instance must be positive");
		ln.name = {std::move(prefix), std::string(ln_class), instance};
	}
	ln.host_resource = ln.name.render();

	auto add = [&](const char *name, Cdc cdc) {
		DataValue v = cdc == Cdc::DPC ? DataValue {make_enum("Dbpos", "off")} : default_value(value_type(cdc));
		ln.data_objects.push_back({name, cdc, std::move(v), {}, 0});
	};
	if (ln_class == "XCBR") {
		add("Pos", Cdc::DPC);
	} else if (ln_class == "PTOC") {
		add("Str", Cdc::ACT);
		add("Op", Cdc::ACT);
	} else if (ln_class == "PTRC") {
		add("Tr", Cdc::ACT);
	} else if (ln_class == "RREC") {
		add("Op", Cdc::ACT);
		add("BlkRec", Cdc::SPS);
	} else if (ln_class == "TCTR") {
		add("Amp", Cdc::MV);
	}
	return ln;
}

LogicalDevice make_ld(std::string name)
{
	LogicalDevice ld;
	ld.name = std::move(name);
	ld.logical_nodes.push_back(build_ln("LLN0", 0));
	return ld;
}

void DataModel::add_ld(LogicalDevice ld)
{
	if (!is_identifier(ld.name))
		throw NameError("logical device name '" + ld.name + "' is not an identifier");
	if (find_ld(ld.name))
		throw Error("duplicate logical device '" + ld.name + "'");
	if (!ld.find("LLN0"))
		throw Error(ld.name + ": LLN0 is mandatory");
	lds_.push_back(std::move(ld));
}

LogicalDevice *DataModel::find_ld(std::string_view name)
{
	for (auto &ld : lds_)
		if (ld.name == name)
			return &ld;
	return nullptr;
}

const LogicalDevice *DataModel::find_ld(std::string_view name) const
{
	return const_cast<DataModel *>(this)->find_ld(name);
}

const DataObject &DataModel::locate(const ObjectReference &ref) const
{
	const auto text = ref.render();
	const auto *ld = find_ld(ref.ld);
	if (!ld)
		throw ResolveError(RefLevel::ld, text + ": unknown logical device '" + ref.ld + "'");
	const auto *ln = ld->find(ref.ln);
	if (!ln)
		throw ResolveError(RefLevel::ln, text + ": unknown logical node '" + ref.ln + "' in " + ref.ld);
	const auto *dobj = ln->find(ref.data_object);
	if (!dobj)
		throw ResolveError(RefLevel::data_object,
		                   text + ": unknown data object '" + ref.data_object + "' in " + ref.ln);
	if (ref.attribute != value_attribute(dobj->cdc) && ref.attribute != "q" && ref.attribute != "t")
		throw ResolveError(RefLevel::attribute, text + ": " + std::string(cdc_name(dobj->cdc)) +
		                                            " has no attribute '" + ref.attribute + "'");
	return *dobj;
}

DataObject &DataModel::locate(const ObjectReference &ref)
{
	return const_cast<DataObject &>(static_cast<const DataModel *>(this)->locate(ref));
}

AttributeValue DataModel::resolve(const ObjectReference &ref) const
{
	const auto &d = locate(ref);
	if (ref.attribute == "q")
		return {make_enum("Validity", d.q.validity), d.q, d.t};
	if (ref.attribute == "t")
		return {Timestamp {d.t}, d.q, d.t};
	return {d.value, d.q, d.t};
}

std::optional<ChangeRecord> DataModel::update_attribute(const ObjectReference &ref, const DataValue &value,
                                                        VirtualTime at)
{
	auto &d = locate(ref);
	if (ref.attribute == "t")
		throw Error(ref.render() + ": t follows the value and cannot be written");

	DataValue old;
	if (ref.attribute == "q") {
		auto expected = ValueType {ValueKind::enumeration, "Validity"};
		if (type_of(value) != expected)
			throw TypeMismatch(ref.render() + ": expected " + type_name(expected) + ", got " + type_name(type_of(value)));
		old = make_enum("Validity", d.q.validity);
		if (old == value)
			return std::nullopt;
	} else {
		if (!same_type(d.value, value))
			throw TypeMismatch(ref.render() + ": expected " + type_name(type_of(d.value)) + ", got " +
			                   type_name(type_of(value)));
		if (d.value == value)
			return std::nullopt;
		old = d.value;
	}
	if (at < d.t)
		throw Error(ref.render() + ": write at t=" + std::to_string(at) + " precedes the current timestamp");

	if (ref.attribute == "q")
		d.q.validity = std::get<Enumerated>(value).value;
	else
		d.value = value;
	d.t = at;

	ChangeRecord record {ref, std::move(old), value, d.q, at};
	for (const auto &l : listeners_)
		l(record);
	return record;
}

void DataModel::apply(const ChangeRecord &record)
{
	auto &d = locate(record.ref);
	if (record.ref.attribute == "q")
		d.q.validity = std::get<Enumerated>(record.new_value).value;
	else
		d.value = record.new_value;
	d.q = record.q;
	d.t = record.at;
}

std::vector<ObjectReference> DataModel::walk() const
{
	std::vector<ObjectReference> out;
	for (const auto &ld : lds_)
		for (const auto &ln : ld.logical_nodes)
			for (const auto &d : ln.data_objects)
				for (auto attr : {std::string(value_attribute(d.cdc)), std::string("q"), std::string("t")})
					out.push_back({ld.name, ln.name.render(), d.name, attr});
	return out;
}

} // namespace fbsas::ln

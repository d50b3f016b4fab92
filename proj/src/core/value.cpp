#include "fbsas/core/value.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "fbsas/core/error.hpp"

namespace fbsas {

namespace {

const std::map<std::string, std::vector<std::string>, std::less<>> &enum_table()
{
	static const std::map<std::string, std::vector<std::string>, std::less<>> table {
		{"Dbpos", {"intermediate", "off", "on", "bad"}},
		{"Validity", {"good", "invalid", "questionable"}},
		{"Source", {"process", "substituted"}},
	};
	return table;
}

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

ValueType type_of(const DataValue &v)
{
	return std::visit(overloaded {
		[](bool) { return ValueType {ValueKind::boolean, {}}; },
		[](std::int32_t) { return ValueType {ValueKind::int32, {}}; },
		[](double) { return ValueType {ValueKind::float64, {}}; },
		[](const std::string &) { return ValueType {ValueKind::text, {}}; },
		[](const Enumerated &e) { return ValueType {ValueKind::enumeration, e.tag}; },
		[](Timestamp) { return ValueType {ValueKind::timestamp, {}}; },
	}, v);
}

bool same_type(const DataValue &a, const DataValue &b)
{
	return type_of(a) == type_of(b);
}

std::string type_name(const ValueType &t)
{
	switch (t.kind) {
	case ValueKind::boolean: return "bool";
	case ValueKind::int32: return "i32";
	case ValueKind::float64: return "f64";
	case ValueKind::text: return "text";
	case ValueKind::enumeration: return "enum:" + t.enum_tag;
	case ValueKind::timestamp: return "ts";
	}
	return "?";
}

ValueType parse_type(std::string_view text)
{
	if (text == "bool") return {ValueKind::boolean, {}};
	if (text == "i32") return {ValueKind::int32, {}};
	if (text == "f64") return {ValueKind::float64, {}};
	if (text == "text") return {ValueKind::text, {}};
	if (text == "ts") return {ValueKind::timestamp, {}};
	if (text.starts_with("enum:")) {
		auto tag = text.substr(5);
		if (!is_known_enum(tag))
			throw TypeMismatch("unknown enumeration '" + std::string(tag) + "'");
		return {ValueKind::enumeration, std::string(tag)};
	}
	throw TypeMismatch("unknown type name '" + std::string(text) + "'");
}

DataValue default_value(const ValueType &t)
{
	switch (t.kind) {
	case ValueKind::boolean: return false;
	case ValueKind::int32: return std::int32_t {0};
	case ValueKind::float64: return 0.0;
	case ValueKind::text: return std::string {};
	case ValueKind::enumeration: return Enumerated {t.enum_tag, enum_members(t.enum_tag).front()};
	case ValueKind::timestamp: return Timestamp {};
	}
	return false;
}

std::span<const std::string> enum_members(std::string_view tag)
{
	auto it = enum_table().find(tag);
	if (it == enum_table().end())
		throw TypeMismatch("unknown enumeration '" + std::string(tag) + "'");
	return it->second;
}

bool is_known_enum(std::string_view tag)
{
	return enum_table().contains(tag);
}

Enumerated make_enum(std::string_view tag, std::string_view value)
{
	auto members = enum_members(tag);
	if (std::find(members.begin(), members.end(), value) == members.end())
		throw TypeMismatch("'" + std::string(value) + "' is not a member of " + std::string(tag));
	return {std::string(tag), std::string(value)};
}

std::string to_string(const DataValue &v)
{
	return std::visit(overloaded {
		[](bool b) -> std::string { return b ? "true" : "false"; },
		[](std::int32_t i) { return std::to_string(i); },
		[](double d) { return nlohmann::json(d).dump(); },
		[](const std::string &s) { return s; },
		[](const Enumerated &e) { return e.value; },
		[](Timestamp ts) { return std::to_string(ts.ns) + "ns"; },
	}, v);
}

nlohmann::ordered_json to_json(const DataValue &v)
{
	nlohmann::ordered_json j;
	const auto t = type_of(v);
	j["type"] = t.kind == ValueKind::enumeration ? std::string("enum") : type_name(t);
	std::visit(overloaded {
		[&](bool b) { j["v"] = b; },
		[&](std::int32_t i) { j["v"] = i; },
		[&](double d) { j["v"] = d; },
		[&](const std::string &s) { j["v"] = s; },
		[&](const Enumerated &e) { j["tag"] = e.tag; j["v"] = e.value; },
		[&](Timestamp ts) { j["v"] = ts.ns; },
	}, v);
	return j;
}

DataValue value_from_json(const nlohmann::json &j)
{
	if (j.is_boolean()) return j.get<bool>();
	if (j.is_number_integer()) {
		auto i = j.get<std::int64_t>();
		if (i < INT32_MIN || i > INT32_MAX)
			throw TypeMismatch("integer out of i32 range");
		return static_cast<std::int32_t>(i);
	}
	if (j.is_number_float()) return j.get<double>();
	if (j.is_string()) return j.get<std::string>();
	if (!j.is_object() || !j.contains("type") || !j.contains("v"))
		throw TypeMismatch("value must be a scalar or an object with 'type' and 'v'");

	const auto type = j.at("type").get<std::string>();
	const auto &v = j.at("v");
	if (type == "enum") {
		if (!j.contains("tag") || !v.is_string())
			throw TypeMismatch("enum value needs 'tag' and string 'v'");
		return make_enum(j.at("tag").get<std::string>(), v.get<std::string>());
	}
	return coerce(v, parse_type(type));
}

DataValue coerce(const nlohmann::json &j, const ValueType &t)
{
	switch (t.kind) {
	case ValueKind::boolean:
		if (j.is_boolean()) return j.get<bool>();
		break;
	case ValueKind::int32:
		if (j.is_number_integer()) {
			auto i = j.get<std::int64_t>();
			if (i >= INT32_MIN && i <= INT32_MAX) return static_cast<std::int32_t>(i);
		}
		break;
	case ValueKind::float64:
		if (j.is_number()) return j.get<double>();
		break;
	case ValueKind::text:
		if (j.is_string()) return j.get<std::string>();
		break;
	case ValueKind::enumeration:
		if (j.is_string()) return make_enum(t.enum_tag, j.get<std::string>());
		break;
	case ValueKind::timestamp:
		if (j.is_number_integer()) return Timestamp {j.get<std::int64_t>()};
		break;
	}
	throw TypeMismatch("cannot convert " + j.dump() + " to " + type_name(t));
}

} // namespace fbsas

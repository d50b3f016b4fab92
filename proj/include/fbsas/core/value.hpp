#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fbsas/core/time.hpp"

namespace fbsas {

/// A value drawn from a named enumeration (e.g. tag "Dbpos", value "on").
struct Enumerated {
	std::string tag;
	std::string value;

	friend bool operator==(const Enumerated &, const Enumerated &) = default;
};

struct Timestamp {
	VirtualTime ns = 0;

	friend bool operator==(const Timestamp &, const Timestamp &) = default;
};

using DataValue = std::variant<bool, std::int32_t, double, std::string, Enumerated, Timestamp>;

enum class ValueKind : std::uint8_t { boolean, int32, float64, text, enumeration, timestamp };

/// Type of a data port or attribute. `enum_tag` is only meaningful for enumerations.
struct ValueType {
	ValueKind kind = ValueKind::boolean;
	std::string enum_tag;

	friend bool operator==(const ValueType &, const ValueType &) = default;
};

ValueType type_of(const DataValue &v);
bool same_type(const DataValue &a, const DataValue &b);
std::string type_name(const ValueType &t);

/// Parses "bool", "i32", "f64", "text", "ts" or "enum:<Tag>".
ValueType parse_type(std::string_view text);

/// Zero value for a type: false, 0, 0.0, "", first member of the enumeration, t=0.
DataValue default_value(const ValueType &t);

// Enumeration registry. The built-in tags are Dbpos {intermediate, off, on, bad},
// Validity {good, invalid, questionable} and Source {process, substituted}.
std::span<const std::string> enum_members(std::string_view tag);
bool is_known_enum(std::string_view tag);

/// Builds an enumeration value, throwing TypeMismatch if the value is not a member of the tag.
Enumerated make_enum(std::string_view tag, std::string_view value);

std::string to_string(const DataValue &v);

/// Typed JSON form: {"type":"bool","v":true}, {"type":"enum","tag":"Dbpos","v":"on"}, ...
nlohmann::ordered_json to_json(const DataValue &v);
DataValue value_from_json(const nlohmann::json &j);

/// Converts a JSON scalar to the given type (used for FB parameters and bare values).
DataValue coerce(const nlohmann::json &j, const ValueType &t);

} // namespace fbsas

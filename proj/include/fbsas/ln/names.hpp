#pragma once

#include <string>
#include <string_view>

#include "fbsas/core/error.hpp"

namespace fbsas::ln {

class NameError : public Error {
public:
	using Error::Error;
};

bool is_supported_class(std::string_view ln_class);

/// Standardized logical node name: optional prefix, four-letter class, instance number.
/// LLN0 is fixed and carries no instance number (instance 0).
struct LnName {
	std::string prefix;
	std::string ln_class;
	int instance = 0;

	std::string render() const;
	/// Inverse of render(). Throws NameError on malformed names or unsupported classes.
	static LnName parse(std::string_view text);

	friend bool operator==(const LnName &, const LnName &) = default;
};

/// `[A-Za-z][A-Za-z0-9]*`
bool is_identifier(std::string_view s);

/// "LD/LN.DO.attr"
struct ObjectReference {
	std::string ld;
	std::string ln;
	std::string data_object;
	std::string attribute;

	std::string render() const;
	static ObjectReference parse(std::string_view text);

	friend bool operator==(const ObjectReference &, const ObjectReference &) = default;
	friend auto operator<=>(const ObjectReference &, const ObjectReference &) = default;
};

} // namespace fbsas::ln

#include "fbsas/ln/names.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace fbsas::ln {

namespace {

constexpr std::array kClasses {"LLN0", "PTOC", "PTRC", "RREC", "TCTR", "XCBR"};

} // namespace

bool is_supported_class(std::string_view ln_class)
{
	return std::find(kClasses.begin(), kClasses.end(), ln_class) != kClasses.end();
}

bool is_identifier(std::string_view s)
{
	if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
		return false;
	return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

std::string LnName::render() const
{
	if (ln_class == "LLN0")
		return "LLN0";
	return prefix + ln_class + std::to_string(instance);
}

LnName LnName::parse(std::string_view text)
{
	const std::string quoted = "'" + std::string(text) + "'";
	if (text == "LLN0")
		return {"", "LLN0", 0};
	if (!is_identifier(text))
		throw NameError("logical node name " + quoted + " is not an identifier");

	auto digits = text.find_last_not_of("0123456789");
	if (digits == std::string_view::npos || digits + 1 == text.size())
		throw NameError("logical node name " + quoted + " has no instance number");
	auto number = text.substr(digits + 1);
	if (number[0] == '0')
		throw NameError("logical node name " + quoted + " has a zero or zero-padded instance number");
	if (number.size() > 9)
		throw NameError("logical node name " + quoted + " has an out-of-range instance number");
	auto head = text.substr(0, digits + 1);
	if (head.size() < 4)
		throw NameError("logical node name " + quoted + " has no four-letter class");

	LnName n;
	n.ln_class = std::string(head.substr(head.size() - 4));
	n.prefix = std::string(head.substr(0, head.size() - 4));
	n.instance = std::stoi(std::string(number));
	if (!is_supported_class(n.ln_class) || n.ln_class == "LLN0")
		throw NameError("unsupported logical node class '" + n.ln_class + "' in " + quoted);
	return n;
}

std::string ObjectReference::render() const
{
	return ld + "/" + ln + "." + data_object + "." + attribute;
}

ObjectReference ObjectReference::parse(std::string_view text)
{
	const auto fail = [&](const char *why) {
		return NameError("object reference '" + std::string(text) + "': " + why);
	};
	auto slash = text.find('/');
	if (slash == std::string_view::npos)
		throw fail("expected LD/LN.DO.attr");
	ObjectReference r;
	r.ld = std::string(text.substr(0, slash));
	auto rest = text.substr(slash + 1);
	auto d1 = rest.find('.');
	auto d2 = d1 == std::string_view::npos ? d1 : rest.find('.', d1 + 1);
	if (d2 == std::string_view::npos || rest.find('.', d2 + 1) != std::string_view::npos)
		throw fail("expected LD/LN.DO.attr");
	r.ln = std::string(rest.substr(0, d1));
	r.data_object = std::string(rest.substr(d1 + 1, d2 - d1 - 1));
	r.attribute = std::string(rest.substr(d2 + 1));
	for (const auto *part : {&r.ld, &r.ln, &r.data_object, &r.attribute})
		if (!is_identifier(*part))
			throw fail("segments must match [A-Za-z][A-Za-z0-9]*");
	return r;
}

} // namespace fbsas::ln

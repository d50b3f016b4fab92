#include <expat.h>

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "fbsas/scl/document.hpp"

namespace fbsas::scl {

namespace {

std::string_view local_name(const char *name)
{
	std::string_view n(name);
	auto sep = n.rfind('|');
	return sep == std::string_view::npos ? n : n.substr(sep + 1);
}

std::uint32_t parse_number(const std::string &text, std::uint32_t max, const std::string &what)
{
	std::string_view s = text;
	int base = 10;
	if (s.starts_with("0x") || s.starts_with("0X")) {
		s.remove_prefix(2);
		base = 16;
	}
	std::uint64_t v = 0;
	auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
	if (s.empty() || ec != std::errc() || end != s.data() + s.size() || v > max)
		throw SclError(what + ": '" + text + "' is not a valid number");
	return static_cast<std::uint32_t>(v);
}

class Builder {
public:
	explicit Builder(XML_Parser parser) : parser_(parser) {}

	void start(const char *raw_name, const char **raw_attrs)
	{
		auto name = std::string(local_name(raw_name));
		std::map<std::string, std::string, std::less<>> attrs;
		for (auto a = raw_attrs; *a; a += 2)
			attrs.emplace(std::string(local_name(a[0])), a[1]);

		if (skip_depth_ > 0) {
			++skip_depth_;
			return;
		}

		const auto parent = stack_.empty() ? std::string() : stack_.back().name;
		auto label = name;
		if (auto it = attrs.find("name"); it != attrs.end())
			label += "[" + it->second + "]";
		else if (auto it2 = attrs.find("inst"); it2 != attrs.end() && name == "LDevice")
			label += "[" + it2->second + "]";
		stack_.push_back({name, label});
		text_.clear();

		auto require = [&](const char *attr) -> std::string {
			auto it = attrs.find(attr);
			if (it == attrs.end())
				throw SclError(path() + ": missing required attribute '" + attr + "'");
			return it->second;
		};
		auto optional = [&](const char *attr, std::string fallback = {}) {
			auto it = attrs.find(attr);
			return it == attrs.end() ? fallback : it->second;
		};

		if (name == "SCL" && parent.empty()) {
			seen_root_ = true;
		} else if (stack_.size() == 1) {
			throw SclError(path() + ": root element must be SCL");
		} else if (name == "Header" && parent == "SCL") {
			doc.header = {require("id"), optional("version"), optional("revision")};
		} else if (name == "IED" && parent == "SCL") {
			doc.ieds.push_back({require("name"), optional("manufacturer"), {}});
		} else if (name == "AccessPoint" && parent == "IED") {
			doc.ieds.back().access_points.push_back({require("name"), {}});
		} else if (name == "Server" && parent == "AccessPoint") {
		} else if (name == "LDevice" && parent == "Server") {
			access_point().ldevices.push_back({require("inst"), {}, {}, {}, {}});
		} else if (name == "LN0" && parent == "LDevice") {
			auto cls = require("lnClass");
			if (cls != "LLN0")
				throw SclError(path() + ": LN0 must have lnClass=\"LLN0\"");
			ldevice().ln0 = SclLn {"", cls, optional("inst"), optional("lnType"), {}};
			ln_ = &*ldevice().ln0;
		} else if (name == "LN" && parent == "LDevice") {
			ldevice().lns.push_back({optional("prefix"), require("lnClass"), require("inst"), optional("lnType"), {}});
			ln_ = &ldevice().lns.back();
		} else if (name == "DOI" && (parent == "LN" || parent == "LN0")) {
			ln_->dois.push_back({require("name"), {}});
		} else if (name == "DAI" && parent == "DOI") {
			ln_->dois.back().dais.push_back({require("name"), std::nullopt, optional("valKind")});
		} else if (name == "Val" && parent == "DAI") {
		} else if (name == "DataSet" && parent == "LN0") {
			ldevice().datasets.push_back({require("name"), {}});
		} else if (name == "FCDA" && parent == "DataSet") {
			SclFcda f;
			f.ld_inst = require("ldInst");
			f.prefix = optional("prefix");
			f.ln_class = require("lnClass");
			f.ln_inst = f.ln_class == "LLN0" ? optional("lnInst") : require("lnInst");
			f.do_name = require("doName");
			f.da_name = require("daName");
			f.fc = optional("fc");
			ldevice().datasets.back().members.push_back(std::move(f));
		} else if (name == "GSEControl" && parent == "LN0") {
			SclGseControl g;
			g.name = require("name");
			g.dat_set = require("datSet");
			g.app_id = static_cast<std::uint16_t>(parse_number(require("appID"), 0xFFFF, path() + " appID"));
			g.conf_rev = parse_number(optional("confRev", "1"), 0xFFFFFFFF, path() + " confRev");
			g.go_id = optional("goID", g.name);
			ldevice().gse_controls.push_back(std::move(g));
		} else {
			doc.warnings.push_back(path() + ": unrecognized element ignored (line " + line() + ")");
			stack_.pop_back();
			skip_depth_ = 1;
		}
	}

	void end(const char *)
	{
		if (skip_depth_ > 0) {
			--skip_depth_;
			return;
		}
		const auto &name = stack_.back().name;
		if (name == "Val") {
			auto &dai = ln_->dois.back().dais.back();
			dai.val = trim(text_);
		} else if (name == "LN" || name == "LN0") {
			ln_ = nullptr;
		}
		stack_.pop_back();
		text_.clear();
	}

	void text(const char *s, int len)
	{
		if (skip_depth_ == 0 && !stack_.empty() && stack_.back().name == "Val")
			text_.append(s, static_cast<std::size_t>(len));
	}

	void finish()
	{
		if (!seen_root_)
			throw SclError("document has no SCL root element");
		if (doc.ieds.empty())
			doc.warnings.push_back("SCL: no IED");
		std::set<std::string> ieds;
		for (const auto &ied : doc.ieds) {
			if (!ieds.insert(ied.name).second)
				throw SclError("SCL/IED[" + ied.name + "]: duplicate IED name");
			for (const auto &ap : ied.access_points)
				for (const auto &ld : ap.ldevices) {
					std::set<std::string> lns;
					for (const auto &ln : ld.lns)
						if (!lns.insert(ln.name()).second)
							throw SclError("SCL/IED[" + ied.name + "]/AccessPoint[" + ap.name + "]/Server/LDevice[" +
							               ld.inst + "]: duplicate LN " + ln.name());
				}
		}
	}

	SclDocument doc;

private:
	struct Frame {
		std::string name;
		std::string label;
	};

	static std::string trim(const std::string &s)
	{
		auto b = s.find_first_not_of(" \t\r\n");
		if (b == std::string::npos)
			return {};
		auto e = s.find_last_not_of(" \t\r\n");
		return s.substr(b, e - b + 1);
	}

	std::string path() const
	{
		std::string p;
		for (const auto &f : stack_)
			p += (p.empty() ? "" : "/") + f.label;
		return p;
	}

	std::string line() const { return std::to_string(XML_GetCurrentLineNumber(parser_)); }

	SclAccessPoint &access_point() { return doc.ieds.back().access_points.back(); }
	SclLDevice &ldevice() { return access_point().ldevices.back(); }

	XML_Parser parser_;
	std::vector<Frame> stack_;
	std::string text_;
	SclLn *ln_ = nullptr;
	int skip_depth_ = 0;
	bool seen_root_ = false;
};

struct ParserHandle {
	XML_Parser p;
	~ParserHandle() { XML_ParserFree(p); }
};

} // namespace

const SclIed *SclDocument::find_ied(std::string_view name) const
{
	for (const auto &i : ieds)
		if (i.name == name)
			return &i;
	return nullptr;
}

SclDocument parse_scl(std::string_view xml)
{
	ParserHandle h {XML_ParserCreateNS("UTF-8", '|')};
	if (!h.p)
		throw SclError("cannot create XML parser");
	Builder builder(h.p);
	std::optional<SclError> failure;

	struct Ctx {
		Builder *b;
		std::optional<SclError> *failure;
		XML_Parser p;
	} ctx {&builder, &failure, h.p};

	XML_SetUserData(h.p, &ctx);
	XML_SetElementHandler(
		h.p,
		[](void *u, const char *name, const char **attrs) {
			auto *c = static_cast<Ctx *>(u);
			try {
				c->b->start(name, attrs);
			} catch (const SclError &e) {
				*c->failure = e;
				XML_StopParser(c->p, XML_FALSE);
			}
		},
		[](void *u, const char *name) {
			auto *c = static_cast<Ctx *>(u);
			c->b->end(name);
		});
	XML_SetCharacterDataHandler(h.p, [](void *u, const char *s, int len) { static_cast<Ctx *>(u)->b->text(s, len); });

	if (xml.size() > static_cast<std::size_t>(std::numeric_limits<int>::max()))
		throw SclError("document too large");
	auto status = XML_Parse(h.p, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
	if (failure)
		throw *failure;
	if (status != XML_STATUS_OK)
		throw SclError("malformed XML at line " + std::to_string(XML_GetCurrentLineNumber(h.p)) + ", column " +
		               std::to_string(XML_GetCurrentColumnNumber(h.p) + 1) + ": " +
		               XML_ErrorString(XML_GetErrorCode(h.p)));
	builder.finish();
	return std::move(builder.doc);
}

SclDocument parse_scl_file(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw SclError(path + ": cannot open");
	std::stringstream ss;
	ss << in.rdbuf();
	try {
		return parse_scl(ss.str());
	} catch (const SclError &e) {
		throw SclError(path + ": " + e.what());
	}
}

} // namespace fbsas::scl

#include <sstream>

#include "fbsas/scl/document.hpp"

namespace fbsas::scl {

namespace {

std::string escape(std::string_view s)
{
	std::string out;
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		case '\'': out += "&apos;"; break;
		default: out += c;
		}
	}
	return out;
}

class Writer {
public:
	void open(int depth, const char *name, std::initializer_list<std::pair<const char *, std::string>> attrs,
	          bool empty)
	{
		out_ << std::string(static_cast<std::size_t>(depth) * 2, ' ') << '<' << name;
		for (const auto &[k, v] : attrs)
			out_ << ' ' << k << "=\"" << escape(v) << '"';
		out_ << (empty ? "/>\n" : ">\n");
	}

	void close(int depth, const char *name) { out_ << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "</" << name << ">\n"; }

	void raw(std::string_view s) { out_ << s; }

	std::string str() const { return out_.str(); }

private:
	std::ostringstream out_;
};

void write_ln(Writer &w, int depth, const SclLn &ln, const SclLDevice *ld0_owner)
{
	const bool is_ln0 = ld0_owner != nullptr;
	const char *tag = is_ln0 ? "LN0" : "LN";
	const bool empty = ln.dois.empty() && (!is_ln0 || (ld0_owner->datasets.empty() && ld0_owner->gse_controls.empty()));
	if (is_ln0)
		w.open(depth, tag, {{"lnClass", ln.ln_class}, {"inst", ln.inst}, {"lnType", ln.ln_type}}, empty);
	else
		w.open(depth, tag, {{"prefix", ln.prefix}, {"lnClass", ln.ln_class}, {"inst", ln.inst}, {"lnType", ln.ln_type}},
		       empty);
	if (empty)
		return;

	if (is_ln0) {
		for (const auto &ds : ld0_owner->datasets) {
			w.open(depth + 1, "DataSet", {{"name", ds.name}}, ds.members.empty());
			for (const auto &m : ds.members)
				w.open(depth + 2, "FCDA",
				       {{"ldInst", m.ld_inst},
				        {"prefix", m.prefix},
				        {"lnClass", m.ln_class},
				        {"lnInst", m.ln_inst},
				        {"doName", m.do_name},
				        {"daName", m.da_name},
				        {"fc", m.fc}},
				       true);
			if (!ds.members.empty())
				w.close(depth + 1, "DataSet");
		}
		for (const auto &g : ld0_owner->gse_controls) {
			std::ostringstream app;
			app << "0x" << std::hex << std::uppercase << g.app_id;
			w.open(depth + 1, "GSEControl",
			       {{"name", g.name},
			        {"datSet", g.dat_set},
			        {"confRev", std::to_string(g.conf_rev)},
			        {"appID", app.str()},
			        {"goID", g.go_id}},
			       true);
		}
	}
	for (const auto &doi : ln.dois) {
		w.open(depth + 1, "DOI", {{"name", doi.name}}, doi.dais.empty());
		for (const auto &dai : doi.dais) {
			const bool has_val = dai.val.has_value();
			if (dai.val_kind.empty())
				w.open(depth + 2, "DAI", {{"name", dai.name}}, !has_val);
			else
				w.open(depth + 2, "DAI", {{"name", dai.name}, {"valKind", dai.val_kind}}, !has_val);
			if (has_val) {
				w.raw(std::string(static_cast<std::size_t>(depth + 3) * 2, ' ') + "<Val>" + escape(*dai.val) +
				      "</Val>\n");
				w.close(depth + 2, "DAI");
			}
		}
		if (!doi.dais.empty())
			w.close(depth + 1, "DOI");
	}
	w.close(depth, tag);
}

} // namespace

std::string write_scl(const SclDocument &doc)
{
	Writer w;
	w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
	w.open(0, "SCL", {{"xmlns", "http://www.iec.ch/61850/2003/SCL"}}, false);
	w.open(1, "Header", {{"id", doc.header.id}, {"version", doc.header.version}, {"revision", doc.header.revision}}, true);
	for (const auto &ied : doc.ieds) {
		w.open(1, "IED", {{"name", ied.name}, {"manufacturer", ied.manufacturer}}, ied.access_points.empty());
		for (const auto &ap : ied.access_points) {
			w.open(2, "AccessPoint", {{"name", ap.name}}, false);
			w.open(3, "Server", {}, ap.ldevices.empty());
			for (const auto &ld : ap.ldevices) {
				w.open(4, "LDevice", {{"inst", ld.inst}}, !ld.ln0 && ld.lns.empty());
				if (ld.ln0)
					write_ln(w, 5, *ld.ln0, &ld);
				for (const auto &ln : ld.lns)
					write_ln(w, 5, ln, nullptr);
				if (ld.ln0 || !ld.lns.empty())
					w.close(4, "LDevice");
			}
			if (!ap.ldevices.empty())
				w.close(3, "Server");
			w.close(2, "AccessPoint");
		}
		if (!ied.access_points.empty())
			w.close(1, "IED");
	}
	w.close(0, "SCL");
	return w.str();
}

} // namespace fbsas::scl

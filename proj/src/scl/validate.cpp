#include <map>
#include <set>

#include <json.hpp>

#include "fbsas/fb/system.hpp"
#include "fbsas/ln/model.hpp"
#include "fbsas/scl/validate.hpp"

namespace fbsas::scl {

namespace {

bool is_ln_resource(const std::string &name)
{
	try {
		ln::LnName::parse(name);
		return true;
	} catch (const Error &) {
		return false;
	}
}

/// Which attribute names are legal on a data object: its value attribute, q and t.
bool attribute_exists(const ln::DataObject &obj, std::string_view da)
{
	return da == ln::value_attribute(obj.cdc) || da == "q" || da == "t";
}

std::optional<ln::LogicalNode> template_for(const SclLn &ln)
{
	try {
		int inst = ln.ln_class == "LLN0" ? 0 : std::stoi(ln.inst);
		return ln::build_ln(ln.ln_class, inst, ln.prefix);
	} catch (const std::exception &) {
		return std::nullopt;
	}
}

} // namespace

bool Report::consistent() const { return findings.empty(); }

std::size_t Report::count(std::string_view code) const
{
	std::size_t n = 0;
	for (const auto &f : findings)
		n += f.code == code;
	return n;
}

std::string Report::to_json_lines() const
{
	std::string out;
	for (const auto &f : findings) {
		nlohmann::ordered_json j {{"severity", f.severity}, {"ied", f.ied}, {"code", f.code}, {"path", f.path},
		                          {"message", f.message}};
		out += j.dump() + "\n";
	}
	return out;
}

Report validate_against_model(const SclDocument &doc, const fb::SystemModel &system)
{
	Report report;
	auto add = [&](std::string ied, std::string code, std::string path, std::string message) {
		report.findings.push_back({"error", std::move(ied), std::move(code), std::move(path), std::move(message)});
	};

	for (const auto &ied : doc.ieds) {
		const fb::Device *device = nullptr;
		for (const auto &d : system.devices())
			if (d->ied() == ied.name)
				device = d.get();
		if (!device) {
			add(ied.name, "missing_device", "IED[" + ied.name + "]", "no device implements IED " + ied.name);
			continue;
		}

		// (ld name, ln name) pairs on each side.
		std::map<std::pair<std::string, std::string>, const SclLn *> declared;
		std::map<std::string, const SclLDevice *> lds;
		for (const auto &ap : ied.access_points)
			for (const auto &ld : ap.ldevices) {
				auto ldn = ld_name(ied, ld);
				lds[ld.inst] = &ld;
				if (ld.ln0)
					declared[{ldn, "LLN0"}] = &*ld.ln0;
				for (const auto &ln : ld.lns)
					declared[{ldn, ln.name()}] = &ln;
			}

		std::set<std::pair<std::string, std::string>> present;
		for (const auto &r : device->resources()) {
			if (!is_ln_resource(r->name()))
				continue;
			auto ld = device->resource_ld(r->name());
			if (ld.empty()) {
				// Unassigned resources match the node in whichever logical device declares it.
				for (const auto &[key, _] : declared)
					if (key.second == r->name())
						ld = key.first;
			}
			present.insert({ld, r->name()});
		}

		for (const auto &[key, ln] : declared) {
			auto path = "IED[" + ied.name + "]/LDevice[" + key.first + "]/LN[" + key.second + "]";
			auto tmpl = template_for(*ln);
			if (!tmpl) {
				add(ied.name, "unsupported_ln", path, "logical node " + key.second + " has an unsupported class or instance");
				continue;
			}
			if (!present.contains(key))
				add(ied.name, "missing_in_model", path, "logical node " + key.second + " has no resource in device " +
				                                            device->name());
			for (const auto &doi : ln->dois) {
				const auto *obj = tmpl->find(doi.name);
				if (!obj) {
					add(ied.name, "unknown_doi", path + "/DOI[" + doi.name + "]",
					    "data object " + doi.name + " is not part of " + ln->ln_class);
					continue;
				}
				for (const auto &dai : doi.dais)
					if (dai.name != ln::value_attribute(obj->cdc))
						add(ied.name, "unknown_dai", path + "/DOI[" + doi.name + "]/DAI[" + dai.name + "]",
						    "attribute " + dai.name + " cannot carry a configured value");
			}
		}
		for (const auto &key : present)
			if (!declared.contains(key))
				add(ied.name, "undeclared_in_scl", "IED[" + ied.name + "]/LDevice[" + key.first + "]/LN[" + key.second + "]",
				    "resource " + key.second + " of device " + device->name() + " is not declared in the SCL");

		for (const auto &ap : ied.access_points)
			for (const auto &ld : ap.ldevices) {
				std::set<std::string> dataset_names;
				for (const auto &ds : ld.datasets) {
					dataset_names.insert(ds.name);
					for (std::size_t i = 0; i < ds.members.size(); ++i) {
						const auto &m = ds.members[i];
						auto path = "IED[" + ied.name + "]/LDevice[" + ld.inst + "]/DataSet[" + ds.name + "]/FCDA[" +
						            std::to_string(i) + "]";
						auto lit = lds.find(m.ld_inst);
						if (lit == lds.end())
							continue;
						auto dit = declared.find({ied.name + m.ld_inst, m.ln_name()});
						if (dit == declared.end())
							continue;
						auto tmpl = template_for(*dit->second);
						if (!tmpl)
							continue;
						const auto *obj = tmpl->find(m.do_name);
						if (!obj || !attribute_exists(*obj, m.da_name))
							add(ied.name, "unresolvable_member", path,
							    "member " + m.ln_name() + "." + m.do_name + "." + m.da_name + " does not resolve");
					}
				}
				for (const auto &g : ld.gse_controls)
					if (!dataset_names.contains(g.dat_set))
						add(ied.name, "unknown_dataset", "IED[" + ied.name + "]/LDevice[" + ld.inst + "]/GSEControl[" + g.name + "]",
						    "dataset " + g.dat_set + " is not declared");
			}
	}
	return report;
}

} // namespace fbsas::scl

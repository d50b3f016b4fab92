#include <map>

#include <json.hpp>

#include "fbsas/scl/instantiate.hpp"

namespace fbsas::scl {

namespace {

DataValue parse_dai_value(const std::string &text, const ValueType &type, const std::string &where)
{
	auto j = nlohmann::json::parse(text, nullptr, false);
	if (j.is_discarded() || j.is_object() || j.is_array())
		j = text;
	try {
		return coerce(j, type);
	} catch (const Error &e) {
		throw SclError(where + ": " + e.what());
	}
}

int ln_instance(const SclLn &ln, const std::string &where)
{
	if (ln.ln_class == "LLN0")
		return 0;
	try {
		std::size_t used = 0;
		int v = std::stoi(ln.inst, &used);
		if (used == ln.inst.size())
			return v;
	} catch (const std::exception &) {
	}
	throw SclError(where + ": LN inst '" + ln.inst + "' is not a number");
}

} // namespace

IedInstance *SclInstance::find(std::string_view ied)
{
	for (auto &i : ieds)
		if (i.name == ied)
			return &i;
	return nullptr;
}

const IedInstance *SclInstance::find(std::string_view ied) const
{
	return const_cast<SclInstance *>(this)->find(ied);
}

SclInstance instantiate_from_scl(const SclDocument &doc)
{
	SclInstance out;
	std::map<std::uint16_t, std::string> app_ids;

	for (const auto &ied : doc.ieds) {
		IedInstance inst;
		inst.name = ied.name;

		for (const auto &ap : ied.access_points)
			for (const auto &sld : ap.ldevices) {
				auto ld = ln::make_ld(ld_name(ied, sld));
				auto apply_dois = [&](ln::LogicalNode &node, const SclLn &sln, const std::string &where) {
					for (const auto &doi : sln.dois) {
						auto *obj = node.find(doi.name);
						if (!obj)
							throw SclError(where + "/DOI[" + doi.name + "]: unknown data object");
						for (const auto &dai : doi.dais) {
							auto dai_where = where + "/DOI[" + doi.name + "]/DAI[" + dai.name + "]";
							if (dai.name != ln::value_attribute(obj->cdc))
								throw SclError(dai_where + ": only the value attribute can be configured");
							if (dai.val)
								obj->value = parse_dai_value(*dai.val, ln::value_type(obj->cdc), dai_where);
							if (dai.val_kind == "Set")
								inst.writable.insert({ld.name, node.name.render(), doi.name, dai.name});
						}
					}
				};
				auto base = "IED[" + ied.name + "]/LDevice[" + sld.inst + "]";
				if (sld.ln0)
					apply_dois(ld.logical_nodes.front(), *sld.ln0, base + "/LN0");
				for (const auto &sln : sld.lns) {
					auto where = base + "/LN[" + sln.name() + "]";
					auto node = ln::build_ln(sln.ln_class, ln_instance(sln, where), sln.prefix);
					apply_dois(node, sln, where);
					ld.add(std::move(node));
				}
				for (const auto &node : ld.logical_nodes)
					for (const auto &obj : node.data_objects)
						inst.exposed.push_back(
							{ld.name, node.name.render(), obj.name, std::string(ln::value_attribute(obj.cdc))});
				inst.model.add_ld(std::move(ld));
			}

		for (const auto &ap : ied.access_points)
			for (const auto &sld : ap.ldevices) {
				std::map<std::string, goose::DataSetDef> datasets;
				for (const auto &ds : sld.datasets) {
					goose::DataSetDef def {ds.name, {}};
					for (const auto &m : ds.members) {
						ln::ObjectReference ref {ied.name + m.ld_inst, m.ln_name(), m.do_name, m.da_name};
						try {
							inst.model.resolve(ref);
						} catch (const Error &e) {
							throw SclError("IED[" + ied.name + "]/DataSet[" + ds.name + "]: " + e.what());
						}
						def.members.push_back(std::move(ref));
					}
					datasets[ds.name] = std::move(def);
				}
				for (const auto &g : sld.gse_controls) {
					auto where = "IED[" + ied.name + "]/GSEControl[" + g.name + "]";
					auto it = datasets.find(g.dat_set);
					if (it == datasets.end())
						throw SclError(where + ": unknown dataset " + g.dat_set);
					auto [prev, fresh] = app_ids.emplace(g.app_id, where);
					if (!fresh)
						throw SclError(where + ": appID " + std::to_string(g.app_id) + " already used by " + prev->second);
					goose::GcbConfig cfg;
					cfg.name = g.name;
					cfg.go_id = g.go_id;
					cfg.app_id = g.app_id;
					cfg.dataset = it->second;
					cfg.conf_rev = g.conf_rev;
					inst.gcbs.push_back(std::move(cfg));
				}
			}
		out.ieds.push_back(std::move(inst));
	}
	return out;
}

} // namespace fbsas::scl

#include "fbsas/fb/loader.hpp"

#include <fstream>
#include <set>

namespace fbsas::fb {

namespace {

template <class F> decltype(auto) at_path(const std::string &path, F &&f)
{
	try {
		return f();
	} catch (const LoadError &) {
		throw;
	} catch (const std::exception &e) {
		throw LoadError(path + ": " + e.what());
	}
}

const nlohmann::json &array_or_empty(const nlohmann::json &j, const char *key)
{
	static const nlohmann::json empty = nlohmann::json::array();
	if (!j.contains(key))
		return empty;
	const auto &v = j.at(key);
	if (!v.is_array())
		throw Error(std::string("'") + key + "' must be an array");
	return v;
}

ConnectionDecl connection_from_json(const nlohmann::json &j)
{
	ConnectionDecl c;
	c.from = j.at("from").get<std::string>();
	c.to = j.at("to").get<std::string>();
	auto kind = j.at("kind").get<std::string>();
	if (kind == "event")
		c.kind = ConnectionKind::event;
	else if (kind == "data")
		c.kind = ConnectionKind::data;
	else
		throw Error("connection kind must be 'event' or 'data', got '" + kind + "'");
	return c;
}

FbDecl fb_from_json(const nlohmann::json &j)
{
	FbDecl d;
	d.type = j.at("type").get<std::string>();
	d.name = j.at("name").get<std::string>();
	if (d.name.empty() || d.name.find_first_of("./ ") != std::string::npos)
		throw Error("invalid block name '" + d.name + "'");
	if (j.contains("parameters"))
		d.parameters = j.at("parameters");
	return d;
}

} // namespace

std::shared_ptr<BasicFbType> basic_type_from_json(const nlohmann::json &j, const TypeRegistry &registry)
{
	auto t = std::make_shared<BasicFbType>();
	t->type_name = j.at("name").get<std::string>();
	t->iface = interface_from_json(j.value("interface", nlohmann::json::object()));
	for (const auto &v : array_or_empty(j, "internals")) {
		auto type = parse_type(v.at("type").get<std::string>());
		DataValue init = v.contains("init") ? coerce(v.at("init"), type) : default_value(type);
		t->internals.push_back({v.at("name").get<std::string>(), Direction::input, std::move(init)});
	}

	const auto &ecc = j.at("ecc");
	t->ecc.initial_state = ecc.at("initial").get<std::string>();
	for (const auto &s : ecc.at("states")) {
		EccState state {s.at("name").get<std::string>(), {}};
		for (const auto &a : array_or_empty(s, "actions")) {
			EccAction action {a.value("algorithm", ""), a.value("output", "")};
			if (!action.algorithm.empty() && !t->algorithms.contains(action.algorithm)) {
				const auto *alg = registry.algorithm(action.algorithm);
				if (!alg)
					throw Error("state " + state.name + ": algorithm '" + action.algorithm + "' is not registered");
				t->algorithms.emplace(action.algorithm, *alg);
			}
			state.actions.push_back(std::move(action));
		}
		t->ecc.states.push_back(std::move(state));
	}
	for (const auto &tr : array_or_empty(ecc, "transitions")) {
		EccTransition transition;
		transition.source = tr.at("from").get<std::string>();
		transition.target = tr.at("to").get<std::string>();
		transition.trigger = tr.value("on", "");
		transition.guard = GuardExpr::parse(tr.value("guard", "1"));
		t->ecc.transitions.push_back(std::move(transition));
	}
	t->validate();
	return t;
}

CompositeType composite_type_from_json(const nlohmann::json &j)
{
	CompositeType t;
	t.type_name = j.at("name").get<std::string>();
	t.iface = interface_from_json(j.value("interface", nlohmann::json::object()));
	const auto &fbs = array_or_empty(j, "fbs");
	for (std::size_t i = 0; i < fbs.size(); ++i)
		t.fbs.push_back(at_path("fbs[" + std::to_string(i) + "]", [&] { return fb_from_json(fbs[i]); }));
	const auto &conns = array_or_empty(j, "connections");
	for (std::size_t i = 0; i < conns.size(); ++i)
		t.connections.push_back(
			at_path("connections[" + std::to_string(i) + "]", [&] { return connection_from_json(conns[i]); }));
	return t;
}

std::unique_ptr<SystemModel> load_system(const nlohmann::json &doc, TypeRegistry &registry)
{
	if (!doc.is_object())
		throw LoadError("$: system description must be a JSON object");

	const auto &basics = at_path("$", [&]() -> const nlohmann::json & { return array_or_empty(doc, "basic_types"); });
	for (std::size_t i = 0; i < basics.size(); ++i) {
		const auto path = "basic_types[" + std::to_string(i) + "]";
		at_path(path, [&] { registry.add_basic(basic_type_from_json(basics[i], registry)); });
	}
	const auto &composites =
		at_path("$", [&]() -> const nlohmann::json & { return array_or_empty(doc, "composite_types"); });
	for (std::size_t i = 0; i < composites.size(); ++i) {
		const auto path = "composite_types[" + std::to_string(i) + "]";
		at_path(path, [&] { registry.add_composite(composite_type_from_json(composites[i])); });
	}

	auto system = std::make_unique<SystemModel>();
	const auto &devices = at_path("$", [&]() -> const nlohmann::json & { return array_or_empty(doc, "devices"); });
	for (std::size_t d = 0; d < devices.size(); ++d) {
		const auto dpath = "devices[" + std::to_string(d) + "]";
		const auto &dj = devices[d];
		auto &device = at_path(dpath, [&]() -> Device & {
			auto &dev = system->add_device(dj.at("name").get<std::string>(), dj.value("address", ""));
			dev.set_ied(dj.value("ied", ""));
			return dev;
		});

		const auto &resources = at_path(dpath, [&]() -> const nlohmann::json & { return array_or_empty(dj, "resources"); });
		for (std::size_t r = 0; r < resources.size(); ++r) {
			const auto rpath = dpath + ".resources[" + std::to_string(r) + "]";
			const auto &rj = resources[r];
			auto &resource = at_path(rpath, [&]() -> Resource & {
				auto &res = device.add_resource(rj.at("name").get<std::string>());
				if (rj.contains("ld"))
					device.set_resource_ld(res.name(), rj.at("ld").get<std::string>());
				return res;
			});

			const auto &fbs = at_path(rpath, [&]() -> const nlohmann::json & { return array_or_empty(rj, "fbs"); });
			for (std::size_t f = 0; f < fbs.size(); ++f) {
				at_path(rpath + ".fbs[" + std::to_string(f) + "]", [&] {
					auto decl = fb_from_json(fbs[f]);
					registry.instantiate(resource, decl.type, decl.name, decl.parameters);
				});
			}
			const auto &conns =
				at_path(rpath, [&]() -> const nlohmann::json & { return array_or_empty(rj, "connections"); });
			for (std::size_t c = 0; c < conns.size(); ++c) {
				at_path(rpath + ".connections[" + std::to_string(c) + "]", [&] {
					auto decl = connection_from_json(conns[c]);
					if (decl.kind == ConnectionKind::event)
						resource.connect_event(decl.from, decl.to);
					else
						resource.connect_data(decl.from, decl.to);
				});
			}
		}
	}
	return system;
}

std::unique_ptr<SystemModel> load_system_file(const std::filesystem::path &path, TypeRegistry &registry)
{
	std::ifstream in(path);
	if (!in)
		throw LoadError(path.string() + ": cannot open");
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(in);
	} catch (const nlohmann::json::parse_error &e) {
		throw LoadError(path.string() + ": " + e.what());
	}
	return load_system(doc, registry);
}

} // namespace fbsas::fb

#include "fbsas/fb/registry.hpp"

#include "fbsas/fb/std_blocks.hpp"

namespace fbsas::fb {

namespace {

nlohmann::json substitute(const nlohmann::json &value, const nlohmann::json &outer, const std::string &where)
{
	if (value.is_object() || value.is_array()) {
		auto out = value;
		for (auto &v : out)
			v = substitute(v, outer, where);
		return out;
	}
	if (!value.is_string())
		return value;

	const auto &text = value.get_ref<const std::string &>();
	if (text.starts_with("${") && text.ends_with("}") && text.find("${", 2) == std::string::npos) {
		auto name = text.substr(2, text.size() - 3);
		if (!outer.contains(name))
			throw Error(where + ": parameter '" + name + "' is not supplied");
		return outer[name];
	}
	std::string out;
	std::size_t pos = 0;
	for (;;) {
		auto open = text.find("${", pos);
		if (open == std::string::npos)
			break;
		auto close = text.find('}', open);
		if (close == std::string::npos)
			break;
		auto name = text.substr(open + 2, close - open - 2);
		if (!outer.contains(name))
			throw Error(where + ": parameter '" + name + "' is not supplied");
		const auto &v = outer[name];
		out += text.substr(pos, open - pos);
		out += v.is_string() ? v.get<std::string>() : v.dump();
		pos = close + 1;
	}
	out += text.substr(pos);
	return out;
}

bool has_dot(std::string_view s)
{
	return s.find('.') != std::string_view::npos;
}

} // namespace

void apply_input_parameters(FunctionBlock &fb, const nlohmann::json &params)
{
	if (params.is_null())
		return;
	if (!params.is_object())
		throw Error(fb.name() + ": parameters must be an object");
	for (const auto &[key, value] : params.items()) {
		const auto *port = fb.interface().data_input(key);
		if (!port)
			throw Error(fb.name() + ": parameter '" + key + "' does not name a data input");
		fb.set_input(key, coerce(value, type_of(port->value)));
	}
}

void TypeRegistry::add_factory(std::string type_name, BlockFactory factory)
{
	if (has_type(type_name))
		throw Error("duplicate block type '" + type_name + "'");
	factories_.emplace(std::move(type_name), std::move(factory));
}

void TypeRegistry::add_basic(std::shared_ptr<const BasicFbType> type)
{
	if (has_type(type->type_name))
		throw Error("duplicate block type '" + type->type_name + "'");
	type->validate();
	basics_.emplace(type->type_name, std::move(type));
}

void TypeRegistry::add_composite(CompositeType type)
{
	if (has_type(type.type_name))
		throw Error("duplicate block type '" + type.type_name + "'");
	type.iface.validate(type.type_name);
	for (const auto &fb : type.fbs)
		if (!has_type(fb.type))
			throw Error(type.type_name + "." + fb.name + ": unknown block type '" + fb.type + "'");
	auto name = type.type_name;
	composites_.emplace(std::move(name), std::move(type));
}

void TypeRegistry::add_algorithm(std::string id, Algorithm algorithm)
{
	if (algorithms_.contains(id))
		throw Error("duplicate algorithm '" + id + "'");
	algorithms_.emplace(std::move(id), std::move(algorithm));
}

bool TypeRegistry::has_type(std::string_view type_name) const
{
	return factories_.contains(type_name) || basics_.contains(type_name) || composites_.contains(type_name);
}

const Algorithm *TypeRegistry::algorithm(std::string_view id) const
{
	auto it = algorithms_.find(id);
	return it == algorithms_.end() ? nullptr : &it->second;
}

const CompositeType *TypeRegistry::composite(std::string_view type_name) const
{
	auto it = composites_.find(type_name);
	return it == composites_.end() ? nullptr : &it->second;
}

std::shared_ptr<const BasicFbType> TypeRegistry::basic(std::string_view type_name) const
{
	auto it = basics_.find(type_name);
	return it == basics_.end() ? nullptr : it->second;
}

void TypeRegistry::instantiate(Resource &resource, std::string_view type_name, const std::string &instance,
                               const nlohmann::json &params) const
{
	if (auto it = factories_.find(type_name); it != factories_.end()) {
		resource.add(it->second(instance, params));
		return;
	}
	if (auto it = basics_.find(type_name); it != basics_.end()) {
		auto &fb = resource.add(std::make_unique<BasicFunctionBlock>(instance, it->second));
		apply_input_parameters(fb, params);
		return;
	}
	if (auto it = composites_.find(type_name); it != composites_.end()) {
		instantiate_composite(resource, it->second, instance, params);
		return;
	}
	throw Error(resource.path() + "/" + instance + ": unknown block type '" + std::string(type_name) + "'");
}

void TypeRegistry::instantiate_composite(Resource &resource, const CompositeType &type, const std::string &instance,
                                         const nlohmann::json &params) const
{
	const auto where = resource.path() + "/" + instance;
	const auto outer = params.is_null() ? nlohmann::json::object() : params;

	for (const auto &fb : type.fbs)
		instantiate(resource, fb.type, instance + "." + fb.name, substitute(fb.parameters, outer, where + "." + fb.name));

	std::map<std::string, std::vector<Endpoint>> ev_in, ev_out, data_in;
	std::map<std::string, Endpoint> data_out;
	for (const auto &p : type.iface.event_inputs) ev_in[p.name];
	for (const auto &p : type.iface.event_outputs) ev_out[p.name];
	for (const auto &p : type.iface.data_inputs) data_in[p.name];

	auto inner = [&](const std::string &e) { return instance + "." + e; };
	auto append = [](std::vector<Endpoint> &dst, const std::vector<Endpoint> &src) {
		dst.insert(dst.end(), src.begin(), src.end());
	};

	for (const auto &c : type.connections) {
		const bool from_boundary = !has_dot(c.from);
		const bool to_boundary = !has_dot(c.to);
		const auto label = where + ": connection " + c.from + " -> " + c.to;
		if (from_boundary && to_boundary)
			throw Error(label + ": boundary-to-boundary passthrough is not supported");

		if (c.kind == ConnectionKind::event) {
			if (from_boundary) {
				if (!type.iface.event_input(c.from))
					throw Error(label + ": '" + c.from + "' is not an input event of " + type.type_name);
				append(ev_in[c.from], resource.resolve_event_input(inner(c.to)));
			} else if (to_boundary) {
				if (!type.iface.event_output(c.to))
					throw Error(label + ": '" + c.to + "' is not an output event of " + type.type_name);
				append(ev_out[c.to], resource.resolve_event_output(inner(c.from)));
			} else {
				resource.connect_event(inner(c.from), inner(c.to));
			}
			continue;
		}

		if (from_boundary) {
			const auto *port = type.iface.data_input(c.from);
			if (!port)
				throw Error(label + ": '" + c.from + "' is not a data input of " + type.type_name);
			for (const auto &leaf : resource.resolve_data_input(inner(c.to))) {
				const auto &v = resource.at(leaf.fb).interface().data_input(leaf.port)->value;
				if (!same_type(v, port->value))
					throw TypeMismatch(label + ": type mismatch");
				data_in[c.from].push_back(leaf);
			}
		} else if (to_boundary) {
			const auto *port = type.iface.data_output(c.to);
			if (!port)
				throw Error(label + ": '" + c.to + "' is not a data output of " + type.type_name);
			auto leaf = resource.resolve_data_output(inner(c.from));
			if (!leaf)
				throw Error(label + ": source is not bound");
			if (!same_type(resource.at(leaf->fb).interface().data_output(leaf->port)->value, port->value))
				throw TypeMismatch(label + ": type mismatch");
			if (!data_out.emplace(c.to, *leaf).second)
				throw Error(label + ": data output '" + c.to + "' already has a source");
		} else {
			resource.connect_data(inner(c.from), inner(c.to));
		}
	}

	for (auto &[port, leaves] : ev_in) resource.bind_event_input(inner(port), std::move(leaves));
	for (auto &[port, leaves] : ev_out) resource.bind_event_output(inner(port), std::move(leaves));
	for (auto &[port, leaves] : data_in) resource.bind_data_input(inner(port), std::move(leaves));
	for (auto &[port, leaf] : data_out) resource.bind_data_output(inner(port), std::move(leaf));

	// Composite-level defaults for data inputs that nothing outside connects to.
	if (!outer.empty()) {
		for (const auto &[key, value] : outer.items()) {
			const auto *port = type.iface.data_input(key);
			if (!port)
				continue;
			auto v = coerce(value, type_of(port->value));
			for (const auto &leaf : resource.resolve_data_input(inner(key)))
				resource.at(leaf.fb).set_input(leaf.port, v);
		}
	}
}

TypeRegistry standard_registry()
{
	TypeRegistry r;
	register_std_blocks(r);
	return r;
}

} // namespace fbsas::fb

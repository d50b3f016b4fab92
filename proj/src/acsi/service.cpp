#include "fbsas/acsi/service.hpp"

namespace fbsas::acsi {

namespace {

nlohmann::json failure(std::string code, std::string message)
{
	return {{"ok", false}, {"err", std::move(code)}, {"message", std::move(message)}};
}

} // namespace

WriteRoute default_route(std::string_view device, const ln::ObjectReference &ref)
{
	return {std::string(device) + "/" + ref.ln + "/MFB.SET_" + ref.data_object, ref.data_object};
}

AcsiService::AcsiService(const scl::IedInstance &ied, std::string device, fb::InboundQueue &inbound)
	: ied_(ied.name), device_(std::move(device)), inbound_(inbound), writable_(ied.writable)
{
	auto &top = tree_[""];
	for (const auto &ld : ied.model.lds()) {
		top.insert(ld.name);
		auto &lns = tree_[ld.name];
		for (const auto &node : ld.logical_nodes) {
			auto name = node.name.render();
			lns.insert(name);
			auto &dos = tree_[ld.name + "/" + name];
			for (const auto &obj : node.data_objects)
				dos.insert(obj.name);
		}
	}
	tree_[ied_] = top;
	tree_[device_] = top;

	auto snap = std::make_shared<Snapshot>();
	snap->entries = ServerBuffer(ied.model, ied.exposed).entries();
	snapshot_ = std::move(snap);
	route_ = [dev = device_](const ln::ObjectReference &ref) { return default_route(dev, ref); };
}

void AcsiService::publish(const ServerBuffer &buffer)
{
	auto snap = std::make_shared<Snapshot>(Snapshot {buffer.entries(), buffer.sync_t(), buffer.cycles()});
	std::lock_guard lock(mutex_);
	snapshot_ = std::move(snap);
}

std::shared_ptr<const Snapshot> AcsiService::snapshot() const
{
	std::lock_guard lock(mutex_);
	return snapshot_;
}

nlohmann::json AcsiService::handle_text(std::string_view body, std::uint64_t session)
{
	auto req = nlohmann::json::parse(body, nullptr, false);
	if (req.is_discarded())
		return failure("BAD_REQUEST", "request is not valid JSON");
	return handle(req, session);
}

nlohmann::json AcsiService::handle(const nlohmann::json &request, std::uint64_t session)
{
	if (!request.is_object() || !request.contains("op") || !request["op"].is_string())
		return failure("BAD_REQUEST", "request must be an object with a string 'op'");
	auto snap = snapshot();
	const auto op = request["op"].get<std::string>();
	nlohmann::json reply;
	if (op == "get")
		reply = get(request, *snap);
	else if (op == "set")
		reply = set(request, *snap, session);
	else if (op == "dir")
		reply = dir(request);
	else if (op == "hello")
		reply = {{"ok", true}, {"version", kProtocolVersion}, {"ied", ied_}};
	else
		reply = failure("BAD_REQUEST", "unknown op '" + op + "'");
	if (request.contains("id"))
		reply["id"] = request["id"];
	reply["sync_t"] = snap->sync_t;
	return reply;
}

nlohmann::json AcsiService::get(const nlohmann::json &req, const Snapshot &snap)
{
	if (!req.contains("ref") || !req["ref"].is_string())
		return failure("BAD_REQUEST", "'ref' must be a string");
	const auto text = req["ref"].get<std::string>();
	ln::ObjectReference ref;
	try {
		ref = ln::ObjectReference::parse(text);
	} catch (const Error &e) {
		return failure("REF_UNKNOWN", e.what());
	}
	auto it = snap.entries.find(ref);
	if (it == snap.entries.end())
		return failure("REF_UNKNOWN", "no exposed attribute " + text);
	const auto &e = it->second;
	return {{"ok", true},
	        {"ref", text},
	        {"value", to_json(e.value)},
	        {"q", ln::to_json(e.q)},
	        {"t", e.t},
	        {"sync_seq", e.sync_seq}};
}

nlohmann::json AcsiService::set(const nlohmann::json &req, const Snapshot &snap, std::uint64_t session)
{
	if (!req.contains("ref") || !req["ref"].is_string() || !req.contains("value"))
		return failure("BAD_REQUEST", "'set' needs a string 'ref' and a 'value'");
	const auto text = req["ref"].get<std::string>();
	ln::ObjectReference ref;
	try {
		ref = ln::ObjectReference::parse(text);
	} catch (const Error &e) {
		return failure("REF_UNKNOWN", e.what());
	}
	auto it = snap.entries.find(ref);
	if (it == snap.entries.end())
		return failure("REF_UNKNOWN", "no exposed attribute " + text);
	if (!writable_.contains(ref))
		return failure("REF_READONLY", text + " is read-only");

	const auto &raw = req["value"];
	const auto want = type_of(it->second.value);
	DataValue value;
	try {
		value = raw.is_object() ? value_from_json(raw) : coerce(raw, want);
	} catch (const Error &e) {
		return failure("TYPE_MISMATCH", e.what());
	}
	if (!same_type(value, it->second.value))
		return failure("TYPE_MISMATCH", text + " expects " + type_name(want));

	auto route = route_(ref);
	inbound_.push(fb::InboundEvent {route.target, {{route.port, value}}, "acsi:" + ied_ + ":" + std::to_string(session), {}});
	++accepted_writes_;
	return {{"ok", true}, {"ref", text}, {"accepted", true}};
}

nlohmann::json AcsiService::dir(const nlohmann::json &req)
{
	std::string scope;
	if (req.contains("scope")) {
		if (!req["scope"].is_string())
			return failure("BAD_REQUEST", "'scope' must be a string");
		scope = req["scope"].get<std::string>();
	}
	auto it = tree_.find(scope);
	if (it == tree_.end())
		return failure("SCOPE_UNKNOWN", "unknown scope '" + scope + "'");
	return {{"ok", true}, {"scope", scope}, {"names", std::vector<std::string>(it->second.begin(), it->second.end())}};
}

} // namespace fbsas::acsi

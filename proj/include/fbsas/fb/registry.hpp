#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbsas/fb/basic_fb.hpp"
#include "fbsas/fb/system.hpp"

namespace fbsas::fb {

enum class ConnectionKind { event, data };

struct FbDecl {
	std::string type;
	std::string name;
	nlohmann::json parameters = nlohmann::json::object();
};

/// "A.EO" -> "B.EI". Inside a composite type an endpoint without a dot names a port of
/// the composite's own interface.
struct ConnectionDecl {
	std::string from;
	std::string to;
	ConnectionKind kind = ConnectionKind::event;
};

struct CompositeType {
	std::string type_name;
	InterfaceDecl iface;
	std::vector<FbDecl> fbs;
	std::vector<ConnectionDecl> connections;
};

using BlockFactory =
	std::function<std::unique_ptr<FunctionBlock>(const std::string &instance, const nlohmann::json &params)>;

/// Known function block types: C++ factories (service interface and hand-written blocks),
/// basic types with an ECC, and composite types that are flattened on instantiation.
class TypeRegistry {
public:
	void add_factory(std::string type_name, BlockFactory factory);
	void add_basic(std::shared_ptr<const BasicFbType> type);
	void add_composite(CompositeType type);
	void add_algorithm(std::string id, Algorithm algorithm);

	bool has_type(std::string_view type_name) const;
	const Algorithm *algorithm(std::string_view id) const;
	const CompositeType *composite(std::string_view type_name) const;
	std::shared_ptr<const BasicFbType> basic(std::string_view type_name) const;

	/// Adds `instance` of `type_name` to the resource. Composite instances become leaves
	/// named "INSTANCE.inner" plus boundary bindings. String parameters of inner blocks may
	/// refer to the outer instance's parameters as "${NAME}".
	void instantiate(Resource &resource, std::string_view type_name, const std::string &instance,
	                 const nlohmann::json &params) const;

private:
	void instantiate_composite(Resource &resource, const CompositeType &type, const std::string &instance,
	                           const nlohmann::json &params) const;

	std::map<std::string, BlockFactory, std::less<>> factories_;
	std::map<std::string, std::shared_ptr<const BasicFbType>, std::less<>> basics_;
	std::map<std::string, CompositeType, std::less<>> composites_;
	std::map<std::string, Algorithm, std::less<>> algorithms_;
};

/// Applies {"PORT": value} parameters to a block's data inputs.
void apply_input_parameters(FunctionBlock &fb, const nlohmann::json &params);

/// Registry preloaded with the standard event blocks (see std_blocks.hpp).
TypeRegistry standard_registry();

} // namespace fbsas::fb

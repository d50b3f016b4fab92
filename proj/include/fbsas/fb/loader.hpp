#pragma once

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "fbsas/fb/registry.hpp"
#include "fbsas/fb/system.hpp"

namespace fbsas::fb {

/// A system description problem; the message starts with the JSON path of the offending
/// element, e.g. "devices[1].resources[0].connections[2]: unknown block 'X'".
class LoadError : public Error {
public:
	using Error::Error;
};

/// Reads "basic_types" and "composite_types" into the registry (in that order), then builds
/// the devices. Basic type algorithms must already be registered. See docs/system-format.md.
std::unique_ptr<SystemModel> load_system(const nlohmann::json &doc, TypeRegistry &registry);
std::unique_ptr<SystemModel> load_system_file(const std::filesystem::path &path, TypeRegistry &registry);

std::shared_ptr<BasicFbType> basic_type_from_json(const nlohmann::json &j, const TypeRegistry &registry);
CompositeType composite_type_from_json(const nlohmann::json &j);

} // namespace fbsas::fb

#pragma once

#include <set>
#include <string>
#include <vector>

#include "fbsas/goose/control_block.hpp"
#include "fbsas/ln/model.hpp"
#include "fbsas/scl/document.hpp"

namespace fbsas::scl {

struct IedInstance {
	std::string name;
	ln::DataModel model;
	std::vector<goose::GcbConfig> gcbs;
	/// Value attributes of every declared data object; the data a server exposes.
	std::vector<ln::ObjectReference> exposed;
	/// Attributes declared with valKind="Set".
	std::set<ln::ObjectReference> writable;
};

struct SclInstance {
	std::vector<IedInstance> ieds;

	IedInstance *find(std::string_view ied);
	const IedInstance *find(std::string_view ied) const;
};

/// Builds the logical device models, dataset definitions and control block configs.
/// DAI values become initial values. Throws SclError for duplicate app ids, unknown
/// datasets and unresolvable members or DAIs, and ln::NameError for unsupported classes.
SclInstance instantiate_from_scl(const SclDocument &doc);

} // namespace fbsas::scl

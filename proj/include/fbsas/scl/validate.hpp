#pragma once

#include <string>
#include <vector>

#include "fbsas/scl/document.hpp"

namespace fbsas::fb {
class SystemModel;
}

namespace fbsas::scl {

struct Finding {
	std::string severity; ///< "error" or "warning"
	std::string ied;
	std::string code;     ///< missing_in_model, undeclared_in_scl, unresolvable_member, ...
	std::string path;
	std::string message;
};

struct Report {
	std::vector<Finding> findings;

	bool consistent() const;
	std::size_t count(std::string_view code) const;
	/// One JSON object per line.
	std::string to_json_lines() const;
};

/// Cross-checks the document against the function block model. A logical node is
/// present in the model when an IED device (Device::ied() equal to the IED name) has a
/// resource named after the node, in the matching logical device when the resource
/// declares one. Dataset members are checked only for nodes the document declares, so
/// a missing node is reported once rather than once per member.
Report validate_against_model(const SclDocument &doc, const fb::SystemModel &system);

} // namespace fbsas::scl

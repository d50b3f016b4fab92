#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbsas/core/error.hpp"

namespace fbsas::scl {

/// Malformed XML (message carries line and column) or a missing required attribute
/// (message carries the element path).
class SclError : public Error {
public:
	using Error::Error;
};

struct SclHeader {
	std::string id;
	std::string version;
	std::string revision;

	friend bool operator==(const SclHeader &, const SclHeader &) = default;
};

struct SclDai {
	std::string name;
	std::optional<std::string> val;
	std::string val_kind; ///< "Set" marks the attribute writable by clients

	friend bool operator==(const SclDai &, const SclDai &) = default;
};

struct SclDoi {
	std::string name;
	std::vector<SclDai> dais;

	friend bool operator==(const SclDoi &, const SclDoi &) = default;
};

struct SclLn {
	std::string prefix;
	std::string ln_class;
	std::string inst;
	std::string ln_type;
	std::vector<SclDoi> dois;

	/// prefix + class + inst, e.g. "XCBR1"; "LLN0" for the LN0 element.
	std::string name() const { return prefix + ln_class + inst; }

	friend bool operator==(const SclLn &, const SclLn &) = default;
};

struct SclFcda {
	std::string ld_inst;
	std::string prefix;
	std::string ln_class;
	std::string ln_inst;
	std::string do_name;
	std::string da_name;
	std::string fc;

	std::string ln_name() const { return prefix + ln_class + ln_inst; }

	friend bool operator==(const SclFcda &, const SclFcda &) = default;
};

struct SclDataSet {
	std::string name;
	std::vector<SclFcda> members;

	friend bool operator==(const SclDataSet &, const SclDataSet &) = default;
};

struct SclGseControl {
	std::string name;
	std::string dat_set;
	std::uint32_t conf_rev = 1;
	std::uint16_t app_id = 0;
	std::string go_id; ///< defaults to the control's name

	friend bool operator==(const SclGseControl &, const SclGseControl &) = default;
};

struct SclLDevice {
	std::string inst;
	std::optional<SclLn> ln0;
	std::vector<SclLn> lns;
	std::vector<SclDataSet> datasets;         ///< declared inside LN0
	std::vector<SclGseControl> gse_controls;  ///< declared inside LN0

	friend bool operator==(const SclLDevice &, const SclLDevice &) = default;
};

struct SclAccessPoint {
	std::string name;
	std::vector<SclLDevice> ldevices;

	friend bool operator==(const SclAccessPoint &, const SclAccessPoint &) = default;
};

struct SclIed {
	std::string name;
	std::string manufacturer;
	std::vector<SclAccessPoint> access_points;

	friend bool operator==(const SclIed &, const SclIed &) = default;
};

struct SclDocument {
	SclHeader header;
	std::vector<SclIed> ieds;
	/// Unrecognized or misplaced elements and similar non-fatal observations.
	std::vector<std::string> warnings;

	const SclIed *find_ied(std::string_view name) const;

	/// Tree equality, ignoring warnings.
	friend bool operator==(const SclDocument &a, const SclDocument &b)
	{
		return a.header == b.header && a.ieds == b.ieds;
	}
};

/// Logical device name as seen by clients: IED name followed by the LDevice inst.
inline std::string ld_name(const SclIed &ied, const SclLDevice &ld)
{
	return ied.name + ld.inst;
}

SclDocument parse_scl(std::string_view xml);
SclDocument parse_scl_file(const std::string &path);

/// Serializes the recognized subset; parse_scl(write_scl(d)) == d.
std::string write_scl(const SclDocument &doc);

} // namespace fbsas::scl

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fbsas/core/error.hpp"
#include "fbsas/core/value.hpp"

namespace fbsas::goose {

struct GooseMessage {
	std::uint16_t app_id = 0;
	std::string go_id;
	std::uint32_t st_num = 0;
	std::uint32_t sq_num = 0;
	std::uint32_t ttl_ms = 0;
	VirtualTime t = 0; ///< time of the last state change
	std::vector<DataValue> all_data;

	friend bool operator==(const GooseMessage &, const GooseMessage &) = default;
};

nlohmann::ordered_json to_json(const GooseMessage &m);

enum class CodecErrorKind { bad_magic, bad_version, truncated, unknown_tag, length_mismatch, bad_value, unencodable };

std::string_view to_string(CodecErrorKind kind);

class CodecError : public Error {
public:
	CodecError(CodecErrorKind kind, const std::string &detail);
	CodecErrorKind kind() const { return kind_; }

private:
	CodecErrorKind kind_;
};

inline constexpr std::uint8_t kWireVersion = 1;
/// Magic, version, total length, app_id, st_num, sq_num, ttl, t, go_id length.
inline constexpr std::size_t kHeaderSize = 4 + 1 + 2 + 2 + 4 + 4 + 4 + 8 + 1;

/// Big-endian "GOO1" frame. Text values have no wire tag and are rejected.
std::vector<std::uint8_t> encode(const GooseMessage &m);
/// Never reads outside `bytes`; every malformed input raises CodecError.
GooseMessage decode(std::span<const std::uint8_t> bytes);

} // namespace fbsas::goose

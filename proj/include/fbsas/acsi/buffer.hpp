#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fbsas/ln/model.hpp"

namespace fbsas::acsi {

struct BufferEntry {
	DataValue value;
	ln::Quality q;
	VirtualTime t = 0;
	std::uint64_t sync_seq = 0;

	friend bool operator==(const BufferEntry &, const BufferEntry &) = default;
};

/// Server-side copy of the exposed attributes. Keys are the value attributes of the
/// declared data objects; change records for anything else are skipped.
class ServerBuffer {
public:
	ServerBuffer() = default;
	/// Keys come from `exposed`, initial contents from `model`.
	ServerBuffer(const ln::DataModel &model, const std::vector<ln::ObjectReference> &exposed);

	/// Folds the batch per key and writes every key whose folded state differs from the
	/// buffer, bumping its sync_seq. Returns the number of keys written, so replaying a
	/// batch changes nothing and returns 0.
	std::size_t sync_cycle(std::span<const ln::ChangeRecord> records, VirtualTime now);

	const std::map<ln::ObjectReference, BufferEntry> &entries() const { return entries_; }
	const BufferEntry *find(const ln::ObjectReference &ref) const;

	VirtualTime sync_t() const { return sync_t_; }
	std::uint64_t cycles() const { return cycles_; }
	std::uint64_t skipped() const { return skipped_; }

private:
	std::map<ln::ObjectReference, BufferEntry> entries_;
	VirtualTime sync_t_ = 0;
	std::uint64_t cycles_ = 0;
	std::uint64_t skipped_ = 0;
};

} // namespace fbsas::acsi

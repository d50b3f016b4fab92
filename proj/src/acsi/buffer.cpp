#include "fbsas/acsi/buffer.hpp"

namespace fbsas::acsi {

ServerBuffer::ServerBuffer(const ln::DataModel &model, const std::vector<ln::ObjectReference> &exposed)
{
	for (const auto &ref : exposed) {
		auto v = model.resolve(ref);
		entries_[ref] = {v.value, v.q, v.t, 0};
	}
}

const BufferEntry *ServerBuffer::find(const ln::ObjectReference &ref) const
{
	auto it = entries_.find(ref);
	return it == entries_.end() ? nullptr : &it->second;
}

std::size_t ServerBuffer::sync_cycle(std::span<const ln::ChangeRecord> records, VirtualTime now)
{
	std::map<ln::ObjectReference, BufferEntry> folded;
	for (const auto &rec : records) {
		// Records for q or t land on the entry of the owning data object.
		auto it = entries_.end();
		if (rec.ref.attribute == "q" || rec.ref.attribute == "t") {
			for (auto e = entries_.lower_bound({rec.ref.ld, rec.ref.ln, rec.ref.data_object, ""});
			     e != entries_.end() && e->first.ld == rec.ref.ld && e->first.ln == rec.ref.ln &&
			     e->first.data_object == rec.ref.data_object;
			     ++e) {
				it = e;
				break;
			}
		} else {
			it = entries_.find(rec.ref);
		}
		if (it == entries_.end()) {
			++skipped_;
			continue;
		}
		auto [f, fresh] = folded.try_emplace(it->first, it->second);
		auto &entry = f->second;
		if (it->first == rec.ref)
			entry.value = rec.new_value;
		entry.q = rec.q;
		entry.t = rec.at;
	}

	std::size_t written = 0;
	for (auto &[ref, entry] : folded) {
		auto &current = entries_.at(ref);
		if (current.value == entry.value && current.q == entry.q && current.t == entry.t)
			continue;
		entry.sync_seq = current.sync_seq + 1;
		current = entry;
		++written;
	}
	sync_t_ = std::max(sync_t_, now);
	++cycles_;
	return written;
}

} // namespace fbsas::acsi

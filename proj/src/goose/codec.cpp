#include <bit>
#include <cstring>

#include "fbsas/goose/message.hpp"

namespace fbsas::goose {

namespace {

enum Tag : std::uint8_t { tag_bool = 1, tag_i32 = 2, tag_f64 = 3, tag_enum = 4, tag_ts = 5 };

class Writer {
public:
	void u8(std::uint8_t v) { out.push_back(v); }
	void u16(std::uint16_t v) { be(v, 2); }
	void u32(std::uint32_t v) { be(v, 4); }
	void u64(std::uint64_t v) { be(v, 8); }
	void bytes(std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

	void patch_u16(std::size_t at, std::uint16_t v)
	{
		out[at] = static_cast<std::uint8_t>(v >> 8);
		out[at + 1] = static_cast<std::uint8_t>(v);
	}

	std::vector<std::uint8_t> out;

private:
	void be(std::uint64_t v, int n)
	{
		for (int i = n - 1; i >= 0; --i)
			out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
	}
};

class Reader {
public:
	Reader(std::span<const std::uint8_t> b, std::size_t limit) : b_(b), limit_(limit) {}

	std::uint8_t u8() { return static_cast<std::uint8_t>(be(1)); }
	std::uint16_t u16() { return static_cast<std::uint16_t>(be(2)); }
	std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
	std::uint64_t u64() { return be(8); }

	std::string str(std::size_t n, const char *what)
	{
		need(n, what);
		std::string s(reinterpret_cast<const char *>(b_.data() + pos_), n);
		pos_ += n;
		return s;
	}

	std::size_t pos() const { return pos_; }

	void need(std::size_t n, const char *what) const
	{
		if (pos_ + n > limit_)
			throw CodecError(CodecErrorKind::length_mismatch,
			                 std::string(what) + " runs past the declared total length " + std::to_string(limit_));
	}

private:
	std::uint64_t be(std::size_t n)
	{
		need(n, "field");
		std::uint64_t v = 0;
		for (std::size_t i = 0; i < n; ++i)
			v = (v << 8) | b_[pos_ + i];
		pos_ += n;
		return v;
	}

	std::span<const std::uint8_t> b_;
	std::size_t limit_;
	std::size_t pos_ = 0;
};

} // namespace

std::string_view to_string(CodecErrorKind kind)
{
	switch (kind) {
	case CodecErrorKind::bad_magic: return "bad magic";
	case CodecErrorKind::bad_version: return "unsupported version";
	case CodecErrorKind::truncated: return "truncated";
	case CodecErrorKind::unknown_tag: return "unknown value tag";
	case CodecErrorKind::length_mismatch: return "length mismatch";
	case CodecErrorKind::bad_value: return "bad value";
	case CodecErrorKind::unencodable: return "unencodable";
	}
	return "?";
}

CodecError::CodecError(CodecErrorKind kind, const std::string &detail)
	: Error("goose codec: " + std::string(to_string(kind)) + ": " + detail), kind_(kind)
{
}

nlohmann::ordered_json to_json(const GooseMessage &m)
{
	nlohmann::ordered_json j;
	j["app_id"] = m.app_id;
	j["go_id"] = m.go_id;
	j["st_num"] = m.st_num;
	j["sq_num"] = m.sq_num;
	j["ttl_ms"] = m.ttl_ms;
	j["t"] = m.t;
	auto &data = j["data"] = nlohmann::ordered_json::array();
	for (const auto &v : m.all_data)
		data.push_back(fbsas::to_json(v));
	return j;
}

std::vector<std::uint8_t> encode(const GooseMessage &m)
{
	if (m.go_id.size() > 255)
		throw CodecError(CodecErrorKind::unencodable, "go_id longer than 255 bytes");
	if (m.all_data.size() > 0xFFFF)
		throw CodecError(CodecErrorKind::unencodable, "more than 65535 entries");

	Writer w;
	w.bytes("GOO1");
	w.u8(kWireVersion);
	w.u16(0); // total length, patched below
	w.u16(m.app_id);
	w.u32(m.st_num);
	w.u32(m.sq_num);
	w.u32(m.ttl_ms);
	w.u64(static_cast<std::uint64_t>(m.t));
	w.u8(static_cast<std::uint8_t>(m.go_id.size()));
	w.bytes(m.go_id);
	w.u16(static_cast<std::uint16_t>(m.all_data.size()));

	for (const auto &v : m.all_data) {
		std::visit(
			[&](const auto &x) {
				using T = std::decay_t<decltype(x)>;
				if constexpr (std::is_same_v<T, bool>) {
					w.u8(tag_bool), w.u16(1), w.u8(x ? 1 : 0);
				} else if constexpr (std::is_same_v<T, std::int32_t>) {
					w.u8(tag_i32), w.u16(4), w.u32(static_cast<std::uint32_t>(x));
				} else if constexpr (std::is_same_v<T, double>) {
					w.u8(tag_f64), w.u16(8), w.u64(std::bit_cast<std::uint64_t>(x));
				} else if constexpr (std::is_same_v<T, Enumerated>) {
					if (x.tag.size() > 255 || x.value.size() > 255)
						throw CodecError(CodecErrorKind::unencodable, "enumeration names longer than 255 bytes");
					w.u8(tag_enum);
					w.u16(static_cast<std::uint16_t>(2 + x.tag.size() + x.value.size()));
					w.u8(static_cast<std::uint8_t>(x.tag.size()));
					w.bytes(x.tag);
					w.u8(static_cast<std::uint8_t>(x.value.size()));
					w.bytes(x.value);
				} else if constexpr (std::is_same_v<T, Timestamp>) {
					w.u8(tag_ts), w.u16(8), w.u64(static_cast<std::uint64_t>(x.ns));
				} else {
					throw CodecError(CodecErrorKind::unencodable, "text values have no wire representation");
				}
			},
			v);
	}
	if (w.out.size() > 0xFFFF)
		throw CodecError(CodecErrorKind::unencodable, "message longer than 65535 bytes");
	w.patch_u16(5, static_cast<std::uint16_t>(w.out.size()));
	return std::move(w.out);
}

GooseMessage decode(std::span<const std::uint8_t> bytes)
{
	static constexpr std::uint8_t magic[4] = {'G', 'O', 'O', '1'};
	for (std::size_t i = 0; i < 4 && i < bytes.size(); ++i)
		if (bytes[i] != magic[i])
			throw CodecError(CodecErrorKind::bad_magic, "frame does not start with GOO1");
	if (bytes.size() < 7)
		throw CodecError(CodecErrorKind::truncated, std::to_string(bytes.size()) + " bytes, header needs " +
		                                                std::to_string(kHeaderSize));
	if (bytes[4] != kWireVersion)
		throw CodecError(CodecErrorKind::bad_version, "version " + std::to_string(bytes[4]));

	const std::size_t total = (std::size_t {bytes[5]} << 8) | bytes[6];
	if (bytes.size() < total)
		throw CodecError(CodecErrorKind::truncated,
		                 std::to_string(bytes.size()) + " bytes, declared total " + std::to_string(total));
	if (bytes.size() > total)
		throw CodecError(CodecErrorKind::length_mismatch,
		                 std::to_string(bytes.size()) + " bytes, declared total " + std::to_string(total));
	if (total < kHeaderSize)
		throw CodecError(CodecErrorKind::length_mismatch, "declared total " + std::to_string(total) +
		                                                      " is shorter than the header");

	Reader r(bytes, total);
	r.str(7, "header");
	GooseMessage m;
	m.app_id = r.u16();
	m.st_num = r.u32();
	m.sq_num = r.u32();
	m.ttl_ms = r.u32();
	m.t = static_cast<VirtualTime>(r.u64());
	auto go_len = r.u8();
	m.go_id = r.str(go_len, "go_id");
	auto count = r.u16();

	for (std::uint16_t i = 0; i < count; ++i) {
		r.need(3, "entry header");
		auto tag = r.u8();
		auto len = r.u16();
		const auto entry = "entry " + std::to_string(i);
		auto expect = [&](std::size_t n) {
			if (len != n)
				throw CodecError(CodecErrorKind::length_mismatch,
				                 entry + " declares " + std::to_string(len) + " bytes, tag needs " + std::to_string(n));
			r.need(n, entry.c_str());
		};
		switch (tag) {
		case tag_bool: {
			expect(1);
			auto b = r.u8();
			if (b > 1)
				throw CodecError(CodecErrorKind::bad_value, entry + ": boolean byte " + std::to_string(b));
			m.all_data.emplace_back(b == 1);
			break;
		}
		case tag_i32:
			expect(4);
			m.all_data.emplace_back(static_cast<std::int32_t>(r.u32()));
			break;
		case tag_f64:
			expect(8);
			m.all_data.emplace_back(std::bit_cast<double>(r.u64()));
			break;
		case tag_ts:
			expect(8);
			m.all_data.emplace_back(Timestamp {static_cast<VirtualTime>(r.u64())});
			break;
		case tag_enum: {
			r.need(len, entry.c_str());
			const auto start = r.pos();
			if (len < 2)
				throw CodecError(CodecErrorKind::length_mismatch, entry + ": enumeration shorter than 2 bytes");
			auto tag_len = r.u8();
			if (1u + tag_len + 1u > len)
				throw CodecError(CodecErrorKind::length_mismatch, entry + ": enumeration tag overruns the entry");
			auto etag = r.str(tag_len, entry.c_str());
			auto val_len = r.u8();
			if (r.pos() - start + val_len != len)
				throw CodecError(CodecErrorKind::length_mismatch, entry + ": enumeration sizes disagree with entry length");
			auto val = r.str(val_len, entry.c_str());
			try {
				m.all_data.emplace_back(make_enum(etag, val));
			} catch (const TypeMismatch &e) {
				throw CodecError(CodecErrorKind::bad_value, entry + ": " + e.what());
			}
			break;
		}
		default:
			throw CodecError(CodecErrorKind::unknown_tag, entry + ": tag " + std::to_string(tag));
		}
	}
	if (r.pos() != total)
		throw CodecError(CodecErrorKind::length_mismatch,
		                 std::to_string(total - r.pos()) + " trailing bytes inside the declared total");
	return m;
}

} // namespace fbsas::goose

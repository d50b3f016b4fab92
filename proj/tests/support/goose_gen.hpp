#pragma once

#include <random>
#include <vector>

#include "fbsas/goose/message.hpp"

namespace testgen {

/// Random encodable message: up to 40 entries of every wire type, arbitrary numbering.
inline fbsas::goose::GooseMessage random_message(std::mt19937_64 &rng)
{
	using namespace fbsas;
	auto u = [&](std::uint64_t n) { return rng() % n; };
	goose::GooseMessage m;
	m.app_id = static_cast<std::uint16_t>(rng());
	m.st_num = static_cast<std::uint32_t>(rng());
	m.sq_num = static_cast<std::uint32_t>(rng());
	m.ttl_ms = static_cast<std::uint32_t>(rng());
	m.t = static_cast<VirtualTime>(rng());
	for (auto n = u(33); n > 0; --n)
		m.go_id += static_cast<char>('A' + u(26));
	static const std::vector<std::pair<std::string, std::vector<std::string>>> enums {
		{"Dbpos", {"intermediate", "off", "on", "bad"}},
		{"Validity", {"good", "invalid", "questionable"}},
		{"Source", {"process", "substituted"}},
	};
	for (auto n = u(41); n > 0; --n) {
		switch (u(5)) {
		case 0: m.all_data.emplace_back(u(2) == 1); break;
		case 1: m.all_data.emplace_back(static_cast<std::int32_t>(rng())); break;
		case 2: {
			// Avoid NaN so equality is meaningful.
			double d = std::uniform_real_distribution<double>(-1e9, 1e9)(rng);
			m.all_data.emplace_back(d);
			break;
		}
		case 3: {
			const auto &[tag, members] = enums[u(enums.size())];
			m.all_data.emplace_back(make_enum(tag, members[u(members.size())]));
			break;
		}
		default: m.all_data.emplace_back(Timestamp {static_cast<VirtualTime>(rng())}); break;
		}
	}
	return m;
}

/// One to four random edits: bit flips, byte overwrites, truncation, extension, or a
/// corrupted length field.
inline void mutate(std::vector<std::uint8_t> &b, std::mt19937_64 &rng)
{
	auto u = [&](std::uint64_t n) { return n == 0 ? 0 : rng() % n; };
	for (auto edits = 1 + u(4); edits > 0; --edits) {
		switch (u(6)) {
		case 0:
			if (!b.empty()) b[u(b.size())] ^= static_cast<std::uint8_t>(1u << u(8));
			break;
		case 1:
			if (!b.empty()) b[u(b.size())] = static_cast<std::uint8_t>(rng());
			break;
		case 2: b.resize(u(b.size() + 1)); break;
		case 3:
			for (auto n = 1 + u(8); n > 0; --n) b.push_back(static_cast<std::uint8_t>(rng()));
			break;
		case 4:
			if (b.size() >= 7) {
				b[5] = static_cast<std::uint8_t>(rng());
				b[6] = static_cast<std::uint8_t>(rng());
			}
			break;
		default:
			if (b.size() > 8) {
				auto at = 7 + u(b.size() - 7);
				b[at] = static_cast<std::uint8_t>(u(2) ? 0xFF : 0x00);
			}
			break;
		}
	}
}

} // namespace testgen

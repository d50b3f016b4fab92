#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fbsas/core/error.hpp"
#include "fbsas/core/value.hpp"

namespace fbsas::fb {

class GuardSyntaxError : public Error {
public:
	using Error::Error;
};

/// Boolean transition condition over data ports and internal variables.
///
/// Grammar (keywords case-insensitive):
///   expr  := xor ('OR' xor)*
///   xor   := conj ('XOR' conj)*
///   conj  := neg (('AND' | '&') neg)*
///   neg   := 'NOT' neg | cmp
///   cmp   := sum (('=' | '<>' | '<' | '<=' | '>' | '>=') sum)?
///   sum   := prod (('+' | '-') prod)*
///   prod  := unary (('*' | '/') unary)*
///   unary := '-' unary | atom
///   atom  := number | 'TRUE' | 'FALSE' | 'quoted' | identifier | '(' expr ')'
///
/// Enumerations compare as their member name, so `POS = 'on'` works for a Dbpos port.
/// A numeric result is true when non-zero; the guard "1" is the usual always-true guard.
class GuardExpr {
public:
	struct Node;
	using Lookup = std::function<const DataValue *(std::string_view)>;

	GuardExpr();
	static GuardExpr parse(std::string_view text);

	bool evaluate(const Lookup &lookup) const;
	const std::vector<std::string> &identifiers() const { return identifiers_; }
	const std::string &text() const { return text_; }

private:
	std::shared_ptr<const Node> root_;
	std::vector<std::string> identifiers_;
	std::string text_;
};

} // namespace fbsas::fb

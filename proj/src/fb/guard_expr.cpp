#include "fbsas/fb/guard_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <variant>

namespace fbsas::fb {

namespace {

using Scalar = std::variant<bool, std::int64_t, double, std::string>;

enum class Op { lit, var, neg, not_, and_, or_, xor_, add, sub, mul, div, eq, ne, lt, le, gt, ge };

} // namespace

struct GuardExpr::Node {
	Op op = Op::lit;
	Scalar literal;
	std::string name;
	std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const GuardExpr::Node>;

struct Token {
	enum Kind { end, ident, number, string, symbol } kind = end;
	std::string text;
	std::size_t pos = 0;
};

std::string upper(std::string_view s)
{
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
	return out;
}

class Parser {
public:
	explicit Parser(std::string_view text) : text_(text) { advance(); }

	NodePtr parse_all(std::vector<std::string> &identifiers)
	{
		ids_ = &identifiers;
		auto n = parse_or();
		if (tok_.kind != Token::end)
			fail("unexpected '" + tok_.text + "'");
		return n;
	}

private:
	[[noreturn]] void fail(const std::string &msg) const
	{
		throw GuardSyntaxError("guard '" + std::string(text_) + "' at " + std::to_string(tok_.pos) + ": " + msg);
	}

	void advance()
	{
		while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
			++i_;
		tok_ = {};
		tok_.pos = i_;
		if (i_ >= text_.size())
			return;
		const char c = text_[i_];
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
			auto start = i_;
			while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
				++i_;
			tok_.kind = Token::ident;
			tok_.text = text_.substr(start, i_ - start);
		} else if (std::isdigit(static_cast<unsigned char>(c))) {
			auto start = i_;
			while (i_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.'))
				++i_;
			if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
				++i_;
				if (i_ < text_.size() && (text_[i_] == '+' || text_[i_] == '-'))
					++i_;
				while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_])))
					++i_;
			}
			tok_.kind = Token::number;
			tok_.text = text_.substr(start, i_ - start);
		} else if (c == '\'') {
			auto start = ++i_;
			while (i_ < text_.size() && text_[i_] != '\'')
				++i_;
			if (i_ >= text_.size())
				fail("unterminated string");
			tok_.kind = Token::string;
			tok_.text = text_.substr(start, i_ - start);
			++i_;
		} else {
			static constexpr std::string_view two[] = {"<>", "<=", ">="};
			tok_.kind = Token::symbol;
			for (auto s : two) {
				if (text_.substr(i_, 2) == s) {
					tok_.text = s;
					i_ += 2;
					return;
				}
			}
			if (std::string_view("=<>+-*/()&").find(c) == std::string_view::npos) {
				tok_.text = std::string(1, c);
				fail("unexpected character '" + tok_.text + "'");
			}
			tok_.text = std::string(1, c);
			++i_;
		}
	}

	bool keyword(std::string_view kw) const { return tok_.kind == Token::ident && upper(tok_.text) == kw; }
	bool symbol(std::string_view s) const { return tok_.kind == Token::symbol && tok_.text == s; }

	static NodePtr binary(Op op, NodePtr l, NodePtr r)
	{
		auto n = std::make_shared<GuardExpr::Node>();
		n->op = op;
		n->lhs = std::move(l);
		n->rhs = std::move(r);
		return n;
	}

	NodePtr parse_or()
	{
		auto l = parse_xor();
		while (keyword("OR")) {
			advance();
			l = binary(Op::or_, l, parse_xor());
		}
		return l;
	}

	NodePtr parse_xor()
	{
		auto l = parse_and();
		while (keyword("XOR")) {
			advance();
			l = binary(Op::xor_, l, parse_and());
		}
		return l;
	}

	NodePtr parse_and()
	{
		auto l = parse_not();
		while (keyword("AND") || symbol("&")) {
			advance();
			l = binary(Op::and_, l, parse_not());
		}
		return l;
	}

	NodePtr parse_not()
	{
		if (keyword("NOT")) {
			advance();
			return binary(Op::not_, parse_not(), nullptr);
		}
		return parse_cmp();
	}

	NodePtr parse_cmp()
	{
		auto l = parse_sum();
		static const std::pair<std::string_view, Op> ops[] = {
			{"=", Op::eq}, {"<>", Op::ne}, {"<", Op::lt}, {"<=", Op::le}, {">", Op::gt}, {">=", Op::ge}};
		for (auto [s, op] : ops) {
			if (symbol(s)) {
				advance();
				return binary(op, l, parse_sum());
			}
		}
		return l;
	}

	NodePtr parse_sum()
	{
		auto l = parse_prod();
		while (symbol("+") || symbol("-")) {
			auto op = tok_.text == "+" ? Op::add : Op::sub;
			advance();
			l = binary(op, l, parse_prod());
		}
		return l;
	}

	NodePtr parse_prod()
	{
		auto l = parse_unary();
		while (symbol("*") || symbol("/")) {
			auto op = tok_.text == "*" ? Op::mul : Op::div;
			advance();
			l = binary(op, l, parse_unary());
		}
		return l;
	}

	NodePtr parse_unary()
	{
		if (symbol("-")) {
			advance();
			return binary(Op::neg, parse_unary(), nullptr);
		}
		return parse_atom();
	}

	NodePtr parse_atom()
	{
		auto n = std::make_shared<GuardExpr::Node>();
		switch (tok_.kind) {
		case Token::number:
			if (tok_.text.find_first_of(".eE") != std::string::npos)
				n->literal = std::stod(tok_.text);
			else
				n->literal = static_cast<std::int64_t>(std::stoll(tok_.text));
			advance();
			return n;
		case Token::string:
			n->literal = tok_.text;
			advance();
			return n;
		case Token::ident:
			if (keyword("TRUE") || keyword("FALSE")) {
				n->literal = keyword("TRUE");
				advance();
				return n;
			}
			if (keyword("AND") || keyword("OR") || keyword("XOR") || keyword("NOT"))
				fail("unexpected keyword '" + tok_.text + "'");
			n->op = Op::var;
			n->name = tok_.text;
			if (std::find(ids_->begin(), ids_->end(), n->name) == ids_->end())
				ids_->push_back(n->name);
			advance();
			return n;
		case Token::symbol:
			if (symbol("(")) {
				advance();
				auto inner = parse_or();
				if (!symbol(")"))
					fail("expected ')'");
				advance();
				return inner;
			}
			fail("unexpected '" + tok_.text + "'");
		case Token::end:
			fail("unexpected end of expression");
		}
		fail("unreachable");
	}

	std::string_view text_;
	std::size_t i_ = 0;
	Token tok_;
	std::vector<std::string> *ids_ = nullptr;
};

Scalar from_value(const DataValue &v)
{
	return std::visit([](const auto &x) -> Scalar {
		using T = std::decay_t<decltype(x)>;
		if constexpr (std::is_same_v<T, bool>) return x;
		else if constexpr (std::is_same_v<T, std::int32_t>) return static_cast<std::int64_t>(x);
		else if constexpr (std::is_same_v<T, double>) return x;
		else if constexpr (std::is_same_v<T, std::string>) return x;
		else if constexpr (std::is_same_v<T, Enumerated>) return x.value;
		else return static_cast<std::int64_t>(x.ns);
	}, v);
}

bool truthy(const Scalar &s)
{
	if (auto b = std::get_if<bool>(&s)) return *b;
	if (auto i = std::get_if<std::int64_t>(&s)) return *i != 0;
	if (auto d = std::get_if<double>(&s)) return *d != 0.0;
	throw Error("guard: text used as a condition");
}

bool numeric(const Scalar &s) { return std::holds_alternative<std::int64_t>(s) || std::holds_alternative<double>(s); }

double as_double(const Scalar &s)
{
	if (auto i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
	if (auto d = std::get_if<double>(&s)) return *d;
	if (auto b = std::get_if<bool>(&s)) return *b ? 1.0 : 0.0;
	throw Error("guard: text used in arithmetic");
}

int compare(const Scalar &a, const Scalar &b)
{
	if (auto sa = std::get_if<std::string>(&a)) {
		auto sb = std::get_if<std::string>(&b);
		if (!sb) throw Error("guard: comparing text with a non-text value");
		return sa->compare(*sb) < 0 ? -1 : (*sa == *sb ? 0 : 1);
	}
	if (std::holds_alternative<std::string>(b))
		throw Error("guard: comparing text with a non-text value");
	if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
		auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
		return x < y ? -1 : (x == y ? 0 : 1);
	}
	auto x = as_double(a), y = as_double(b);
	return x < y ? -1 : (x == y ? 0 : 1);
}

Scalar arith(Op op, const Scalar &a, const Scalar &b)
{
	if (!numeric(a) || !numeric(b))
		throw Error("guard: arithmetic on non-numeric values");
	if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b) && op != Op::div) {
		auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
		switch (op) {
		case Op::add: return x + y;
		case Op::sub: return x - y;
		default: return x * y;
		}
	}
	auto x = as_double(a), y = as_double(b);
	switch (op) {
	case Op::add: return x + y;
	case Op::sub: return x - y;
	case Op::mul: return x * y;
	default: return x / y;
	}
}

Scalar eval(const GuardExpr::Node &n, const GuardExpr::Lookup &lookup)
{
	switch (n.op) {
	case Op::lit:
		return n.literal;
	case Op::var: {
		const auto *v = lookup(n.name);
		if (!v)
			throw Error("guard: unknown identifier '" + n.name + "'");
		return from_value(*v);
	}
	case Op::neg: {
		auto v = eval(*n.lhs, lookup);
		if (auto i = std::get_if<std::int64_t>(&v)) return -*i;
		return -as_double(v);
	}
	case Op::not_: return !truthy(eval(*n.lhs, lookup));
	case Op::and_: return truthy(eval(*n.lhs, lookup)) && truthy(eval(*n.rhs, lookup));
	case Op::or_: return truthy(eval(*n.lhs, lookup)) || truthy(eval(*n.rhs, lookup));
	case Op::xor_: return truthy(eval(*n.lhs, lookup)) != truthy(eval(*n.rhs, lookup));
	case Op::add:
	case Op::sub:
	case Op::mul:
	case Op::div: return arith(n.op, eval(*n.lhs, lookup), eval(*n.rhs, lookup));
	case Op::eq: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) == 0;
	case Op::ne: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) != 0;
	case Op::lt: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) < 0;
	case Op::le: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) <= 0;
	case Op::gt: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) > 0;
	case Op::ge: return compare(eval(*n.lhs, lookup), eval(*n.rhs, lookup)) >= 0;
	}
	return false;
}

} // namespace

GuardExpr::GuardExpr()
{
	auto n = std::make_shared<Node>();
	n->literal = true;
	root_ = n;
	text_ = "TRUE";
}

GuardExpr GuardExpr::parse(std::string_view text)
{
	GuardExpr g;
	g.text_ = std::string(text);
	Parser p(text);
	g.root_ = p.parse_all(g.identifiers_);
	return g;
}

bool GuardExpr::evaluate(const Lookup &lookup) const
{
	return truthy(eval(*root_, lookup));
}

} // namespace fbsas::fb

#include "fbsas/fb/function_block.hpp"

#include "fbsas/core/error.hpp"

namespace fbsas::fb {

FunctionBlock::FunctionBlock(std::string instance_name, std::string type_name, InterfaceDecl iface)
	: iface_(std::move(iface)), name_(std::move(instance_name)), type_name_(std::move(type_name))
{
	iface_.validate(type_name_);
}

const DataValue &FunctionBlock::input(std::string_view port) const
{
	if (const auto *p = iface_.data_input(port))
		return p->value;
	throw Error(name_ + ": no data input '" + std::string(port) + "'");
}

const DataValue &FunctionBlock::output(std::string_view port) const
{
	if (const auto *p = iface_.data_output(port))
		return p->value;
	throw Error(name_ + ": no data output '" + std::string(port) + "'");
}

void FunctionBlock::set_input(std::string_view port, DataValue v)
{
	auto *p = iface_.data_input(port);
	if (!p)
		throw Error(name_ + ": no data input '" + std::string(port) + "'");
	if (!same_type(p->value, v))
		throw TypeMismatch(name_ + "." + std::string(port) + ": expected " + fbsas::type_name(type_of(p->value)) +
		                   ", got " + fbsas::type_name(type_of(v)));
	p->value = std::move(v);
}

void FunctionBlock::set_output(std::string_view port, DataValue v)
{
	auto *p = iface_.data_output(port);
	if (!p)
		throw Error(name_ + ": no data output '" + std::string(port) + "'");
	if (!same_type(p->value, v))
		throw TypeMismatch(name_ + "." + std::string(port) + ": expected " + fbsas::type_name(type_of(p->value)) +
		                   ", got " + fbsas::type_name(type_of(v)));
	p->value = std::move(v);
}

void FunctionBlock::on_internal(std::string_view tag, std::span<const DataValue>, EventContext &)
{
	throw Error(name_ + ": unexpected internal event '" + std::string(tag) + "'");
}

} // namespace fbsas::fb

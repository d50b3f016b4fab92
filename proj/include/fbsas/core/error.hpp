#pragma once

#include <stdexcept>
#include <string>

namespace fbsas {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Raised when a value does not have the variant/enumeration a slot requires.
class TypeMismatch : public Error {
public:
	using Error::Error;
};

} // namespace fbsas

#pragma once

#include <stdexcept>
#include <string>

namespace xdr {

// Raised for bad configuration or arguments. The CLI maps this to exit
// code 2; every other exception maps to exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace xdr

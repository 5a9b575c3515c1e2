#pragma once

#include <stdexcept>
#include <string>

namespace gof {

// Violated precondition or mismatched arguments.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input data outside the documented domain (bad coordinate, unparsable file).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gof

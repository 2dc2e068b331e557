#pragma once

#include <stdexcept>
#include <string>

namespace mpspec {

// Malformed input: wrong dimensions, bad files, invalid grids. CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The numerics refuse to produce a number, e.g. a non-simple eigenvalue
// passed to a condition number. CLI exit code 3.
class NumericalRefusal : public std::runtime_error {
public:
    explicit NumericalRefusal(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpspec

#pragma once

#include <stdexcept>
#include <string>

namespace nflab {

// Bad user input: malformed config, out-of-contract arguments, rejected presets.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A configured work cap (enumeration cells, sample budget, ...) would be exceeded.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-convergent refinement, integer overflow in exact arithmetic.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// File / stream problems while reading configs or writing reports.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nflab

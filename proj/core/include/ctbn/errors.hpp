#ifndef CTBN_ERRORS_HPP
#define CTBN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctbn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed model or input: bad matrix shape, row sums, unknown names, ...
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Numeric failure at run time: singular solves, zero-probability evidence, ...
class NumericError : public Error {
public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Joint state space larger than the configured cap.
class CapExceededError : public Error {
public:
  explicit CapExceededError(const std::string& msg) : Error(msg) {}
};

} // namespace ctbn

#endif

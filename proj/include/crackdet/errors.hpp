// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_ERRORS_HPP
#define CRACKDET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crackdet {

// Invalid numeric parameter or malformed input value.
class ParameterError : public std::runtime_error {
 public:
  explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Two maps/frames that must agree in size do not.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (degenerate correlation, fit breakdown).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// No foreground pixel found when locating an object bounding box.
class EmptyObjectError : public std::runtime_error {
 public:
  explicit EmptyObjectError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crackdet

#endif  // CRACKDET_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace mmfcomm {

// A parameter set violates a documented invariant (bad spec, bad config value).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A trace does not match the geometry of the bank or window it is used with.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The symbol window cannot hold the delay spread plus one pulse width.
class WindowError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidParameter(message);
}

}  // namespace mmfcomm

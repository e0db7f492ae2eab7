#pragma once

#include <stdexcept>
#include <string>

namespace kk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad index, foreign group, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A group or search space is larger than the library supports.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input: group specs, set literals, documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace kk

#pragma once

#include <stdexcept>
#include <string>

namespace graphon {

// Base for every error the library raises. The CLI maps subclasses onto
// stable exit codes (2 usage, 3 data, 4 size limit).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// An exact routine was asked to handle an instance beyond its enumeration cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// An operation needs at least one observation and got none.
class NoDataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or record.
class LoadError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

}  // namespace detail
}  // namespace graphon

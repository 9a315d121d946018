#pragma once

#include <stdexcept>
#include <string>

namespace qac {

enum class ErrorKind {
  InvalidInput,   // bad argument values, arity mismatches
  Unsupported,    // topology/structure the operation cannot handle
  SizeLimit,      // enumeration or cluster bound exceeded
  Placement,      // chain placement failed after bounded retries
  Statistics,     // too few samples/instances to aggregate
  Scheme,         // invalid decoding scheme / code pairing
  Encoding,       // logical problem touches a non-functional vertex
  Validation,     // config validation failure
  Io,             // file read/write failure
  Reporting,      // missing data or unknown figure id
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qac

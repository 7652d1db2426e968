#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbgpc {

enum class ErrorKind {
  ParameterDomain,  // invalid distribution / family parameters
  Capacity,         // requested object too large or beyond tabulated data
  Shape,            // dimension mismatch between inputs
  Domain,           // point outside the parameter domain, ellipticity violated
  Numeric,          // factorization / eigen-solver failure, integrity checks
  Config,           // invalid experiment configuration
  Compatibility,    // artifact does not match the configuration
  Budget,           // run refused because it exceeds the configured budget
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) raise(kind, what);
}

}  // namespace rbgpc

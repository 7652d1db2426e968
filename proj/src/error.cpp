#include "rbgpc/error.hpp"

namespace rbgpc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParameterDomain: return "parameter-domain";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Config: return "config";
    case ErrorKind::Compatibility: return "compatibility";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + what);
}

}  // namespace rbgpc

#include "bfpack/error.hpp"

namespace bfpack {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
      return "io";
    case ErrorKind::parse:
      return "parse";
    case ErrorKind::config:
      return "config";
    case ErrorKind::capacity:
      return "capacity";
    case ErrorKind::other:
      break;
  }
  return "other";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::parse:
      return 3;
    case ErrorKind::capacity:
      return 4;
    case ErrorKind::io:
    case ErrorKind::other:
      break;
  }
  return 1;
}

}  // namespace bfpack

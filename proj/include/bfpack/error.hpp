#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfpack {

enum class ErrorKind {
  io,
  parse,
  config,
  capacity,
  other,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status for an error category (config 2, parse 3, capacity 4,
/// everything else 1).
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bfpack

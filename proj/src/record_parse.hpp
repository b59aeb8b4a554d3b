#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "bfpack/corpus.hpp"
#include "bfpack/error.hpp"

namespace bfpack::detail {

struct LineResult {
  std::optional<Document> doc;
  ErrorKind error_kind = ErrorKind::parse;
  std::string error;
};

bool is_blank(std::string_view line);

std::string at_line(std::size_t line_no, std::string_view what);

/// Parses one corpus record; failures are returned, not thrown, so the call
/// is safe inside parallel loops.
LineResult parse_line(const std::string& line, std::size_t line_no,
                      const CorpusOptions& options);

}  // namespace bfpack::detail

#include "record_parse.hpp"

#include <algorithm>
#include <cstdint>

#include <json.hpp>

namespace bfpack::detail {

namespace {

using json = nlohmann::json;

// Reads a JSON integer as a signed 64-bit value, or nullopt for non-integers.
std::optional<std::int64_t> as_integer(const json& value) {
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) return INT64_MAX;
    return static_cast<std::int64_t>(u);
  }
  if (value.is_number_integer()) return value.get<std::int64_t>();
  return std::nullopt;
}

}  // namespace

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

std::string at_line(std::size_t line_no, std::string_view what) {
  return "line " + std::to_string(line_no) + ": " + std::string(what);
}

LineResult parse_line(const std::string& line, std::size_t line_no,
                      const CorpusOptions& options) {
  LineResult out;
  auto fail = [&](std::string_view what, ErrorKind kind = ErrorKind::parse) {
    out.error_kind = kind;
    out.error = at_line(line_no, what);
    return out;
  };

  const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded()) return fail("malformed record");
  if (!record.is_object()) return fail("record is not a JSON object");

  const auto id_it = record.find("id");
  if (id_it == record.end() || !id_it->is_string()) {
    return fail("missing or non-string \"id\"");
  }

  Document doc;
  doc.id = id_it->get<std::string>();

  const auto length_it = record.find("length");
  const auto tokens_it = record.find("tokens");
  std::optional<std::int64_t> declared;
  if (length_it != record.end()) {
    declared = as_integer(*length_it);
    if (!declared) return fail("\"length\" is not an integer");
  }
  if (tokens_it != record.end() && !tokens_it->is_array()) {
    return fail("\"tokens\" is not an array");
  }

  std::int64_t raw_length = 0;
  if (options.mode == IngestMode::token_ids) {
    if (tokens_it == record.end()) return fail("missing \"tokens\"");
    doc.tokens.reserve(tokens_it->size() + 1);
    for (const auto& t : *tokens_it) {
      const auto v = as_integer(t);
      if (!v || *v < 0 || *v > static_cast<std::int64_t>(UINT32_MAX)) {
        return fail("token id is not an integer in [0, 2^32-1]");
      }
      doc.tokens.push_back(static_cast<TokenId>(*v));
    }
    raw_length = static_cast<std::int64_t>(doc.tokens.size());
    if (declared && *declared != raw_length) {
      return fail("token count mismatch: \"length\" is " +
                  std::to_string(*declared) + " but " +
                  std::to_string(raw_length) + " tokens given");
    }
  } else if (declared) {
    raw_length = *declared;
  } else if (tokens_it != record.end()) {
    raw_length = static_cast<std::int64_t>(tokens_it->size());
  } else {
    return fail("missing \"length\"");
  }

  if (raw_length <= 0) return fail("document length must be positive");

  Length effective = static_cast<Length>(raw_length);
  if (options.sentinel) {
    effective += 1;
    if (options.mode == IngestMode::token_ids) {
      doc.tokens.push_back(*options.sentinel);
    }
  }
  if (effective > options.max_document_length) {
    return fail("document length " + std::to_string(effective) +
                    " exceeds the cap of " +
                    std::to_string(options.max_document_length),
                ErrorKind::capacity);
  }
  doc.length = effective;
  out.doc = std::move(doc);
  return out;
}

}  // namespace bfpack::detail

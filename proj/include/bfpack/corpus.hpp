#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfpack {

using Length = std::uint64_t;
using TokenId = std::uint32_t;

/// Largest effective document length accepted at ingestion. Chunk offsets are
/// stored as 32-bit values.
inline constexpr Length kMaxDocumentLength = 0xFFFFFFFFull;

/// Largest supported sequence length; bounds the capacity tree's footprint.
inline constexpr std::uint32_t kMaxSeqLen = 1u << 24;

enum class IngestMode {
  lengths_only,
  token_ids,
};

struct Document {
  std::string id;
  /// Effective length: raw token count plus one when the corpus appends a
  /// sentinel.
  Length length = 0;
  /// Present only in token-ids mode; includes the sentinel when enabled.
  std::vector<TokenId> tokens;

  friend bool operator==(const Document&, const Document&) = default;
};

struct CorpusOptions {
  IngestMode mode = IngestMode::lengths_only;
  std::uint32_t max_seq_len = 2048;
  /// Sentinel token id appended to every document, when set.
  std::optional<TokenId> sentinel;
  Length max_document_length = kMaxDocumentLength;
};

/// An ordered, validated collection of documents for one sequence length.
/// Immutable after construction.
class Corpus {
 public:
  Corpus() = default;

  /// Validates the invariants (positive lengths, token counts, unique ids,
  /// L >= 2 with a sentinel) and throws bfpack::Error on violation.
  /// Document lengths must already be effective lengths.
  Corpus(std::vector<Document> documents, std::uint32_t max_seq_len,
         bool sentinel, IngestMode mode = IngestMode::lengths_only);

  /// Builds a lengths-only corpus with generated ids ("d0", "d1", ...).
  /// Raw lengths get +1 when `sentinel` is set.
  static Corpus from_lengths(std::span<const Length> raw_lengths,
                             std::uint32_t max_seq_len, bool sentinel = false);

  std::span<const Document> documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  std::uint32_t max_seq_len() const { return max_seq_len_; }
  bool sentinel() const { return sentinel_; }
  IngestMode mode() const { return mode_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  /// Effective lengths in document order.
  std::vector<Length> lengths() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Document> documents_;
  std::uint32_t max_seq_len_ = 0;
  bool sentinel_ = false;
  IngestMode mode_ = IngestMode::lengths_only;
  std::uint64_t total_tokens_ = 0;
};

/// Parses one record per line. Blank lines are skipped; errors name the
/// 1-based line number of the first bad record in file order.
std::vector<Document> parse_records(std::span<const std::string> lines,
                                    const CorpusOptions& options);

Corpus read_corpus(std::istream& in, const CorpusOptions& options);
Corpus load_corpus(const std::filesystem::path& path,
                   const CorpusOptions& options);

/// Writes the corpus back out as line-delimited records (sentinel excluded).
void write_corpus(std::ostream& out, const Corpus& corpus);

/// Effective length -> number of documents with that length.
std::map<Length, std::uint64_t> length_histogram(const Corpus& corpus);

}  // namespace bfpack

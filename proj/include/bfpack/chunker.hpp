#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bfpack/corpus.hpp"

namespace bfpack {

/// A contiguous slice [start, end) of document `doc` (an index into the
/// corpus). `index` is the slice's ordinal within its document.
struct Chunk {
  std::uint32_t doc = 0;
  std::uint32_t index = 0;
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const { return end - start; }

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

static_assert(sizeof(Chunk) == 16);

struct ChunkSet {
  std::vector<Chunk> chunks;
  /// Cuts per document, indexed like the corpus.
  std::vector<std::uint32_t> cuts;

  friend bool operator==(const ChunkSet&, const ChunkSet&) = default;
};

/// Greedy maximal segmentation: every chunk has exactly `max_seq_len` tokens
/// except possibly the last one of each document. Output is in document
/// order, then chunk order.
std::vector<Chunk> chunk_lengths(std::span<const Length> lengths,
                                 std::uint32_t max_seq_len);

ChunkSet chunk_corpus(const Corpus& corpus);

/// ceil(length / max_seq_len) - 1.
constexpr std::uint64_t minimal_cuts(Length length, std::uint32_t max_seq_len) {
  return length == 0 ? 0 : (length - 1) / max_seq_len;
}

/// Effective length -> total cuts over all documents of that length. Every
/// length present in the corpus has an entry (zero when no cuts).
std::map<Length, std::uint64_t> packing_truncation_histogram(
    const ChunkSet& chunkset, const Corpus& corpus);

}  // namespace bfpack

#include "bfpack/chunker.hpp"

#include <numeric>
#include <unordered_map>

#include "bfpack/error.hpp"

namespace bfpack {

std::vector<Chunk> chunk_lengths(std::span<const Length> lengths,
                                 std::uint32_t max_seq_len) {
  if (max_seq_len == 0) {
    throw Error(ErrorKind::config, "max sequence length must be >= 1");
  }
  if (lengths.size() > UINT32_MAX) {
    throw Error(ErrorKind::capacity, "too many documents for 32-bit indices");
  }
  const auto n = static_cast<std::int64_t>(lengths.size());

  // offsets[i] = index of the first chunk of document i
  std::vector<std::size_t> offsets(lengths.size() + 1, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto len = lengths[static_cast<std::size_t>(i)];
    if (len == 0 || len > kMaxDocumentLength) continue;
    offsets[static_cast<std::size_t>(i) + 1] = minimal_cuts(len, max_seq_len) + 1;
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto len = lengths[i];
    if (len == 0 || len > kMaxDocumentLength) {
      throw Error(ErrorKind::parse, "document " + std::to_string(i) +
                                        " has invalid length " +
                                        std::to_string(len));
    }
  }
  std::inclusive_scan(offsets.begin(), offsets.end(), offsets.begin());

  std::vector<Chunk> chunks(offsets.back());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto doc = static_cast<std::size_t>(i);
    const auto len = static_cast<std::uint32_t>(lengths[doc]);
    std::uint32_t start = 0;
    std::uint32_t index = 0;
    for (std::size_t c = offsets[doc]; c < offsets[doc + 1]; ++c, ++index) {
      const std::uint32_t end =
          len - start > max_seq_len ? start + max_seq_len : len;
      chunks[c] = Chunk{static_cast<std::uint32_t>(doc), index, start, end};
      start = end;
    }
  }
  return chunks;
}

ChunkSet chunk_corpus(const Corpus& corpus) {
  const auto lengths = corpus.lengths();
  ChunkSet out;
  out.chunks = chunk_lengths(lengths, corpus.max_seq_len());
  out.cuts.resize(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    out.cuts[i] =
        static_cast<std::uint32_t>(minimal_cuts(lengths[i], corpus.max_seq_len()));
  }
  return out;
}

std::map<Length, std::uint64_t> packing_truncation_histogram(
    const ChunkSet& chunkset, const Corpus& corpus) {
  if (chunkset.cuts.size() != corpus.size()) {
    throw Error(ErrorKind::other, "chunk set was not built from this corpus");
  }
  const auto n = static_cast<std::int64_t>(corpus.size());
  std::map<Length, std::uint64_t> merged;

#pragma omp parallel
  {
    std::unordered_map<Length, std::uint64_t> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto doc = static_cast<std::size_t>(i);
      local[corpus[doc].length] += chunkset.cuts[doc];
    }
#pragma omp critical(bfpack_truncation_histogram)
    for (const auto& [length, cuts] : local) merged[length] += cuts;
  }
  return merged;
}

}  // namespace bfpack

#pragma once

// Serial reference versions of the OpenMP kernels. They share no code with
// the parallel paths beyond single-record parsing and exist for tests and
// benchmarks.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bfpack/chunker.hpp"
#include "bfpack/corpus.hpp"
#include "bfpack/packer.hpp"
#include "bfpack/toyproc.hpp"

namespace bfpack::reference {

std::vector<Document> parse_records(std::span<const std::string> lines,
                                    const CorpusOptions& options);

std::vector<Chunk> chunk_lengths(std::span<const Length> lengths,
                                 std::uint32_t max_seq_len);

/// std::stable_sort by descending length.
std::vector<Chunk> sort_descending(std::span<const Chunk> chunks);

std::map<Length, std::uint64_t> length_histogram(const Corpus& corpus);

/// Cuts per document from closed forms: ceil(l/L) - 1 for packing methods,
/// sequence boundaries strictly inside each document's stream span for
/// concatenation (the dropped tail, if any, counts as one more cut).
std::vector<std::uint64_t> cuts_per_document(const Corpus& corpus,
                                             Method method,
                                             bool drop_remainder);

std::vector<toy::ToyRow> toy_grid(std::span<const double> ps,
                                  std::uint32_t m_max);

}  // namespace bfpack::reference

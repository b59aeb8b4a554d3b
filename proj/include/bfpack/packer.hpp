#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bfpack/capacity_tree.hpp"
#include "bfpack/chunker.hpp"
#include "bfpack/corpus.hpp"

namespace bfpack {

enum class Method {
  bfd_optimized,
  bfd_naive,
  ffd,
  concat,
  optimal,
};

/// CLI spelling: "bfd", "bfd-naive", "ffd", "concat", "optimal".
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Sequences of chunk references stored back to back. Sequence i spans
/// items[offsets[i], offsets[i + 1]) and is followed by pads[i] padding
/// tokens.
struct PackingPlan {
  std::uint32_t max_seq_len = 0;
  Method method = Method::bfd_optimized;
  std::vector<Chunk> items;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> pads;
  /// Tokens in the source the plan was built from, dropped ones included.
  std::uint64_t source_tokens = 0;

  std::size_t num_sequences() const { return pads.size(); }
  std::span<const Chunk> sequence(std::size_t i) const {
    return std::span<const Chunk>(items).subspan(offsets[i],
                                                 offsets[i + 1] - offsets[i]);
  }
  std::uint64_t total_padding() const;
  std::uint64_t covered_tokens() const;

  friend bool operator==(const PackingPlan&, const PackingPlan&) = default;
};

/// One packing step: the chunk went into `bin`, whose remaining capacity
/// moved from `before` to `after` (`before` is L for a freshly opened bin).
struct Placement {
  std::uint32_t bin = 0;
  std::uint32_t before = 0;
  std::uint32_t after = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

using PackTrace = std::vector<Placement>;

/// Stable counting sort by length, longest first. Lengths must lie in
/// [1, max_seq_len].
std::vector<Chunk> sort_descending(std::span<const Chunk> chunks,
                                   std::uint32_t max_seq_len);

/// Working set of the optimized best-fit packer: the bins table, one LIFO
/// stack of bin ids per remaining capacity, and the capacity tree.
class PackerState {
 public:
  explicit PackerState(std::uint32_t max_seq_len);

  /// Places an item of `weight` in the bin with the smallest sufficient
  /// remaining capacity, opening a new bin when none fits.
  Placement place(std::uint32_t weight);

  std::uint32_t max_seq_len() const { return tree_.capacity(); }
  std::size_t num_bins() const { return remaining_.size(); }
  std::uint32_t remaining(std::size_t bin) const { return remaining_[bin]; }
  const std::vector<std::uint32_t>& remaining() const { return remaining_; }
  const CapacityTree& tree() const { return tree_; }

  /// Bins whose remaining capacity is exactly c, top of stack first.
  std::vector<std::uint32_t> bucket(std::uint32_t c) const;

  /// Capacities in [1, L-1] held by at least one open bin, ascending.
  std::vector<std::uint32_t> live_capacities() const;

 private:
  static constexpr std::uint32_t kNoBin = UINT32_MAX;

  std::vector<std::uint32_t> remaining_;
  // Intrusive stacks: head of each capacity bucket, and per-bin link to the
  // next bin below it in the same bucket.
  std::vector<std::uint32_t> bucket_head_;
  std::vector<std::uint32_t> next_in_bucket_;
  CapacityTree tree_;
};

/// Best-fit decreasing over remaining-capacity values: O(N log L) packing
/// after an O(N + L) counting sort.
PackingPlan pack_bfd_optimized(std::span<const Chunk> chunks,
                               std::uint32_t max_seq_len,
                               PackTrace* trace = nullptr);

/// Textbook best-fit decreasing over an ordered set of open bins. Ties on
/// remaining capacity go to the bin that reached it most recently.
PackingPlan pack_bfd_naive(std::span<const Chunk> chunks,
                           std::uint32_t max_seq_len,
                           PackTrace* trace = nullptr);

/// First-fit decreasing with a max segment tree over N bin slots.
PackingPlan pack_ffd(std::span<const Chunk> chunks, std::uint32_t max_seq_len,
                     PackTrace* trace = nullptr);

/// Concatenates the corpus in order and cuts the stream every L tokens. The
/// final partial sequence is padded, or dropped with `drop_remainder`.
PackingPlan pack_concat(const Corpus& corpus, bool drop_remainder = false);

/// Number of sequence boundaries strictly inside [start, end) of the
/// concatenated stream.
constexpr std::uint64_t concat_cuts(std::uint64_t start, std::uint64_t end,
                                    std::uint32_t max_seq_len) {
  return end <= start ? 0 : (end - 1) / max_seq_len - start / max_seq_len;
}

inline constexpr std::size_t kDefaultOptimalCap = 14;

/// Minimum-bin packing by branch and bound. Small instances only.
PackingPlan pack_optimal(std::span<const Chunk> chunks,
                         std::uint32_t max_seq_len,
                         std::size_t max_items = kDefaultOptimalCap);

/// Dispatches on `method`; chunks must come from chunk_corpus(corpus).
PackingPlan pack(Method method, const Corpus& corpus, const ChunkSet& chunks,
                 bool drop_remainder = false);

}  // namespace bfpack

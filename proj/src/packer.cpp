#include "bfpack/packer.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include <omp.h>

#include "bfpack/error.hpp"

namespace bfpack {

namespace {

void check_chunks(std::span<const Chunk> chunks, std::uint32_t max_seq_len) {
  if (max_seq_len == 0) {
    throw Error(ErrorKind::config, "max sequence length must be >= 1");
  }
  for (const auto& c : chunks) {
    if (c.end <= c.start || c.length() > max_seq_len) {
      throw Error(ErrorKind::capacity,
                  "chunk of length " + std::to_string(c.length()) +
                      " does not fit in [1, " + std::to_string(max_seq_len) +
                      "]");
    }
  }
}

std::uint64_t sum_lengths(std::span<const Chunk> chunks) {
  std::uint64_t total = 0;
  for (const auto& c : chunks) total += c.length();
  return total;
}

// Groups the sorted items by bin, keeping insertion order inside each bin.
PackingPlan assemble(std::span<const Chunk> sorted,
                     std::span<const std::uint32_t> bin_of,
                     std::span<const std::uint32_t> remaining,
                     std::uint32_t max_seq_len, Method method) {
  PackingPlan plan;
  plan.max_seq_len = max_seq_len;
  plan.method = method;
  plan.pads.assign(remaining.begin(), remaining.end());
  plan.offsets.assign(remaining.size() + 1, 0);
  for (const auto bin : bin_of) ++plan.offsets[bin + 1];
  std::partial_sum(plan.offsets.begin(), plan.offsets.end(),
                   plan.offsets.begin());

  std::vector<std::size_t> cursor(plan.offsets.begin(), plan.offsets.end() - 1);
  plan.items.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    plan.items[cursor[bin_of[i]]++] = sorted[i];
  }
  plan.source_tokens = sum_lengths(sorted);
  return plan;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::bfd_optimized:
      return "bfd";
    case Method::bfd_naive:
      return "bfd-naive";
    case Method::ffd:
      return "ffd";
    case Method::concat:
      return "concat";
    case Method::optimal:
      return "optimal";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::bfd_optimized, Method::bfd_naive, Method::ffd,
                 Method::concat, Method::optimal}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::config, "unknown method '" + std::string(name) + "'");
}

std::uint64_t PackingPlan::total_padding() const {
  return std::accumulate(pads.begin(), pads.end(), std::uint64_t{0});
}

std::uint64_t PackingPlan::covered_tokens() const {
  return sum_lengths(items);
}

std::vector<Chunk> sort_descending(std::span<const Chunk> chunks,
                                   std::uint32_t max_seq_len) {
  check_chunks(chunks, max_seq_len);
  const std::size_t n = chunks.size();
  const std::size_t buckets = static_cast<std::size_t>(max_seq_len) + 1;

  // Blocks are fixed up front so the output does not depend on how many
  // threads actually run.
  const std::size_t blocks =
      n < (1u << 16) ? 1
                     : std::min<std::size_t>(
                           static_cast<std::size_t>(omp_get_max_threads()),
                           std::max<std::size_t>(1, n / (4 * buckets)));
  auto block_begin = [&](std::size_t b) { return b * n / blocks; };

  std::vector<std::size_t> counts(blocks * buckets, 0);
  const auto nblocks = static_cast<std::int64_t>(blocks);

#pragma omp parallel for schedule(static, 1) if (blocks > 1)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    auto* count = counts.data() + static_cast<std::size_t>(b) * buckets;
    for (std::size_t i = block_begin(b); i < block_begin(b + 1); ++i) {
      ++count[chunks[i].length()];
    }
  }

  // Longest lengths first; within a length, earlier blocks first.
  std::size_t pos = 0;
  for (std::size_t len = max_seq_len; len >= 1; --len) {
    for (std::size_t b = 0; b < blocks; ++b) {
      auto& slot = counts[b * buckets + len];
      const auto c = slot;
      slot = pos;
      pos += c;
    }
  }

  std::vector<Chunk> out(n);
#pragma omp parallel for schedule(static, 1) if (blocks > 1)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    auto* next = counts.data() + static_cast<std::size_t>(b) * buckets;
    for (std::size_t i = block_begin(b); i < block_begin(b + 1); ++i) {
      out[next[chunks[i].length()]++] = chunks[i];
    }
  }
  return out;
}

PackerState::PackerState(std::uint32_t max_seq_len)
    : bucket_head_(static_cast<std::size_t>(max_seq_len) + 1, kNoBin),
      tree_(max_seq_len) {}

Placement PackerState::place(std::uint32_t weight) {
  const std::uint32_t capacity = tree_.capacity();
  if (weight == 0 || weight > capacity) {
    throw Error(ErrorKind::capacity, "item weight " + std::to_string(weight) +
                                         " outside [1, " +
                                         std::to_string(capacity) + "]");
  }
  const std::uint32_t fit = tree_.best_fit(weight);

  std::uint32_t bin;
  if (fit == capacity) {
    bin = static_cast<std::uint32_t>(remaining_.size());
    remaining_.push_back(capacity);
    next_in_bucket_.push_back(kNoBin);
  } else {
    bin = bucket_head_[fit];
    bucket_head_[fit] = next_in_bucket_[bin];
    if (bucket_head_[fit] == kNoBin) tree_.set_capacity(fit, false);
  }

  const std::uint32_t after = fit - weight;
  remaining_[bin] = after;
  if (after > 0) {
    next_in_bucket_[bin] = bucket_head_[after];
    if (bucket_head_[after] == kNoBin) tree_.set_capacity(after, true);
    bucket_head_[after] = bin;
  } else {
    next_in_bucket_[bin] = kNoBin;
  }
  return Placement{bin, fit, after};
}

std::vector<std::uint32_t> PackerState::bucket(std::uint32_t c) const {
  std::vector<std::uint32_t> out;
  if (c == 0 || c >= bucket_head_.size()) return out;
  for (auto bin = bucket_head_[c]; bin != kNoBin; bin = next_in_bucket_[bin]) {
    out.push_back(bin);
  }
  return out;
}

std::vector<std::uint32_t> PackerState::live_capacities() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 1; c < tree_.capacity(); ++c) {
    if (bucket_head_[c] != kNoBin) out.push_back(c);
  }
  return out;
}

PackingPlan pack_bfd_optimized(std::span<const Chunk> chunks,
                               std::uint32_t max_seq_len, PackTrace* trace) {
  const auto sorted = sort_descending(chunks, max_seq_len);
  PackerState state(max_seq_len);
  std::vector<std::uint32_t> bin_of(sorted.size());
  if (trace) {
    trace->clear();
    trace->reserve(sorted.size());
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto step = state.place(sorted[i].length());
    bin_of[i] = step.bin;
    if (trace) trace->push_back(step);
  }
  return assemble(sorted, bin_of, state.remaining(), max_seq_len,
                  Method::bfd_optimized);
}

PackingPlan pack_bfd_naive(std::span<const Chunk> chunks,
                           std::uint32_t max_seq_len, PackTrace* trace) {
  const auto sorted = sort_descending(chunks, max_seq_len);
  // (remaining, ~stamp, bin): ascending order visits the tightest bins first
  // and, among equals, the one that reached that capacity last.
  using Key = std::tuple<std::uint32_t, std::uint64_t, std::uint32_t>;
  std::set<Key> open;
  std::vector<std::uint32_t> remaining;
  std::vector<std::uint32_t> bin_of(sorted.size());
  if (trace) {
    trace->clear();
    trace->reserve(sorted.size());
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::uint32_t w = sorted[i].length();
    const std::uint64_t stamp = ~static_cast<std::uint64_t>(i);
    std::uint32_t bin;
    std::uint32_t before;
    const auto it = open.lower_bound(Key{w, 0, 0});
    if (it == open.end()) {
      bin = static_cast<std::uint32_t>(remaining.size());
      before = max_seq_len;
      remaining.push_back(max_seq_len);
    } else {
      bin = std::get<2>(*it);
      before = std::get<0>(*it);
      open.erase(it);
    }
    const std::uint32_t after = before - w;
    remaining[bin] = after;
    if (after > 0) open.emplace(after, stamp, bin);
    bin_of[i] = bin;
    if (trace) trace->push_back(Placement{bin, before, after});
  }
  return assemble(sorted, bin_of, remaining, max_seq_len, Method::bfd_naive);
}

PackingPlan pack_ffd(std::span<const Chunk> chunks, std::uint32_t max_seq_len,
                     PackTrace* trace) {
  const auto sorted = sort_descending(chunks, max_seq_len);
  const std::size_t slots = std::bit_ceil(std::max<std::size_t>(sorted.size(), 1));
  // Heap-ordered max tree over bin slots; unopened slots read as empty bins.
  std::vector<std::uint32_t> tree(2 * slots, max_seq_len);
  std::vector<std::uint32_t> bin_of(sorted.size());
  std::uint32_t opened = 0;
  if (trace) {
    trace->clear();
    trace->reserve(sorted.size());
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::uint32_t w = sorted[i].length();
    std::size_t node = 1;
    while (node < slots) {
      node = tree[2 * node] >= w ? 2 * node : 2 * node + 1;
    }
    const auto bin = static_cast<std::uint32_t>(node - slots);
    const std::uint32_t before = tree[node];
    const std::uint32_t after = before - w;
    opened = std::max(opened, bin + 1);
    tree[node] = after;
    for (node /= 2; node >= 1; node /= 2) {
      tree[node] = std::max(tree[2 * node], tree[2 * node + 1]);
    }
    bin_of[i] = bin;
    if (trace) trace->push_back(Placement{bin, before, after});
  }

  std::vector<std::uint32_t> remaining(opened);
  for (std::uint32_t b = 0; b < opened; ++b) remaining[b] = tree[slots + b];
  return assemble(sorted, bin_of, remaining, max_seq_len, Method::ffd);
}

PackingPlan pack_concat(const Corpus& corpus, bool drop_remainder) {
  const std::uint32_t L = corpus.max_seq_len();
  const std::uint64_t total = corpus.total_tokens();
  if (total == 0) {
    PackingPlan empty;
    empty.max_seq_len = L;
    empty.method = Method::concat;
    return empty;
  }
  const std::uint64_t sequences = drop_remainder ? total / L : (total + L - 1) / L;
  const std::uint64_t limit = drop_remainder ? sequences * L : total;

  PackingPlan plan;
  plan.max_seq_len = L;
  plan.method = Method::concat;
  plan.source_tokens = total;
  plan.pads.assign(sequences, 0);
  if (sequences > 0 && !drop_remainder) {
    plan.pads.back() = static_cast<std::uint32_t>(sequences * L - total);
  }

  std::vector<std::size_t> counts(sequences + 1, 0);
  std::uint64_t doc_start = 0;
  for (std::size_t d = 0; d < corpus.size() && doc_start < limit; ++d) {
    const std::uint64_t doc_end = doc_start + corpus[d].length;
    std::uint64_t pos = doc_start;
    std::uint32_t ordinal = 0;
    while (pos < std::min(doc_end, limit)) {
      const std::uint64_t seq = pos / L;
      const std::uint64_t end = std::min({doc_end, limit, (seq + 1) * L});
      plan.items.push_back(Chunk{static_cast<std::uint32_t>(d), ordinal++,
                                 static_cast<std::uint32_t>(pos - doc_start),
                                 static_cast<std::uint32_t>(end - doc_start)});
      ++counts[seq + 1];
      pos = end;
    }
    doc_start = doc_end;
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  plan.offsets = std::move(counts);
  return plan;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(std::span<const Chunk> sorted, std::uint32_t capacity)
      : sorted_(sorted), capacity_(capacity), suffix_(sorted.size() + 1, 0) {
    for (std::size_t i = sorted.size(); i-- > 0;) {
      suffix_[i] = suffix_[i + 1] + sorted[i].length();
    }
    lower_bound_ = (suffix_[0] + capacity - 1) / capacity;
    assign_.resize(sorted.size());
  }

  void seed(std::vector<std::uint32_t> assignment, std::size_t bins) {
    best_assign_ = std::move(assignment);
    best_bins_ = bins;
  }

  void run() {
    if (best_bins_ > lower_bound_) search(0, 0);
  }

  std::size_t best_bins() const { return best_bins_; }
  const std::vector<std::uint32_t>& best_assignment() const {
    return best_assign_;
  }

 private:
  void search(std::size_t i, std::uint64_t free_space) {
    if (done_) return;
    if (i == sorted_.size()) {
      if (open_.size() < best_bins_) {
        best_bins_ = open_.size();
        best_assign_ = assign_;
        done_ = best_bins_ == lower_bound_;
      }
      return;
    }
    const std::uint64_t overflow =
        suffix_[i] > free_space ? suffix_[i] - free_space : 0;
    const std::uint64_t bound = open_.size() + (overflow + capacity_ - 1) / capacity_;
    if (bound >= best_bins_) return;

    const std::uint32_t w = sorted_[i].length();
    std::vector<std::uint32_t> tried;
    for (std::size_t b = 0; b < open_.size(); ++b) {
      const std::uint32_t r = open_[b];
      if (r < w || std::find(tried.begin(), tried.end(), r) != tried.end()) {
        continue;
      }
      tried.push_back(r);
      open_[b] -= w;
      assign_[i] = static_cast<std::uint32_t>(b);
      search(i + 1, free_space - w);
      open_[b] += w;
      if (done_) return;
    }
    if (open_.size() + 1 < best_bins_) {
      open_.push_back(capacity_ - w);
      assign_[i] = static_cast<std::uint32_t>(open_.size() - 1);
      search(i + 1, free_space + capacity_ - w);
      open_.pop_back();
    }
  }

  std::span<const Chunk> sorted_;
  std::uint32_t capacity_;
  std::vector<std::uint64_t> suffix_;
  std::uint64_t lower_bound_ = 0;
  std::vector<std::uint32_t> open_;
  std::vector<std::uint32_t> assign_;
  std::vector<std::uint32_t> best_assign_;
  std::size_t best_bins_ = 0;
  bool done_ = false;
};

}  // namespace

PackingPlan pack_optimal(std::span<const Chunk> chunks,
                         std::uint32_t max_seq_len, std::size_t max_items) {
  if (chunks.size() > max_items) {
    throw Error(ErrorKind::capacity,
                "exact packing limited to " + std::to_string(max_items) +
                    " items, got " + std::to_string(chunks.size()));
  }
  const auto sorted = sort_descending(chunks, max_seq_len);

  // First-fit decreasing gives the incumbent.
  std::vector<std::uint32_t> first_fit(sorted.size());
  std::vector<std::uint32_t> bins;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::uint32_t w = sorted[i].length();
    auto it = std::find_if(bins.begin(), bins.end(),
                           [w](std::uint32_t r) { return r >= w; });
    if (it == bins.end()) it = bins.insert(bins.end(), max_seq_len);
    *it -= w;
    first_fit[i] = static_cast<std::uint32_t>(it - bins.begin());
  }

  BranchAndBound solver(sorted, max_seq_len);
  solver.seed(first_fit, bins.size());
  solver.run();

  const auto& assignment = solver.best_assignment();
  std::vector<std::uint32_t> remaining(solver.best_bins(), max_seq_len);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    remaining[assignment[i]] -= sorted[i].length();
  }
  return assemble(sorted, assignment, remaining, max_seq_len, Method::optimal);
}

PackingPlan pack(Method method, const Corpus& corpus, const ChunkSet& chunks,
                 bool drop_remainder) {
  const std::uint32_t L = corpus.max_seq_len();
  switch (method) {
    case Method::bfd_optimized:
      return pack_bfd_optimized(chunks.chunks, L);
    case Method::bfd_naive:
      return pack_bfd_naive(chunks.chunks, L);
    case Method::ffd:
      return pack_ffd(chunks.chunks, L);
    case Method::concat:
      return pack_concat(corpus, drop_remainder);
    case Method::optimal:
      return pack_optimal(chunks.chunks, L);
  }
  throw Error(ErrorKind::config, "unknown method");
}

}  // namespace bfpack

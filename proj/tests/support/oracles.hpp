#pragma once

// Test-only oracles. Nothing here calls into the code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "bfpack/chunker.hpp"
#include "bfpack/packer.hpp"

namespace bfpack::testing {

/// One chunk per length, document i = length i.
inline std::vector<Chunk> chunks_of(const std::vector<std::uint32_t>& lengths) {
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    out.push_back(Chunk{static_cast<std::uint32_t>(i), 0, 0, lengths[i]});
  }
  return out;
}

inline std::vector<std::uint32_t> random_lengths(std::mt19937_64& rng,
                                                 std::size_t n,
                                                 std::uint32_t max_len) {
  std::uniform_int_distribution<std::uint32_t> len(1, max_len);
  std::vector<std::uint32_t> out(n);
  for (auto& l : out) l = len(rng);
  return out;
}

/// Minimum number of bins by enumerating every set partition (restricted
/// growth strings). Exponential; keep n <= 9.
inline std::size_t brute_force_min_bins(const std::vector<std::uint32_t>& w,
                                        std::uint32_t capacity) {
  const std::size_t n = w.size();
  if (n == 0) return 0;
  std::size_t best = n;
  std::vector<std::uint64_t> load;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (load.size() >= best) return;
    if (i == n) {
      best = load.size();
      return;
    }
    for (std::size_t b = 0; b < load.size(); ++b) {
      if (load[b] + w[i] <= capacity) {
        load[b] += w[i];
        go(i + 1);
        load[b] -= w[i];
      }
    }
    load.push_back(w[i]);
    go(i + 1);
    load.pop_back();
  };
  go(0);
  return best;
}

/// Smallest live capacity >= w by linear scan, 0 when none.
inline std::uint32_t scan_best_fit(const std::set<std::uint32_t>& live,
                                   std::uint32_t w) {
  for (const auto c : live) {
    if (c >= w) return c;
  }
  return 0;
}

/// Replays a trace into the multiset of remaining capacities of open,
/// non-full bins after every step.
inline std::vector<std::multiset<std::uint32_t>> replay_multisets(
    const PackTrace& trace) {
  std::vector<std::multiset<std::uint32_t>> out;
  std::multiset<std::uint32_t> current;
  std::map<std::uint32_t, std::uint32_t> bin_remaining;
  for (const auto& step : trace) {
    const auto it = bin_remaining.find(step.bin);
    if (it != bin_remaining.end()) {
      current.erase(current.find(it->second));
    }
    bin_remaining[step.bin] = step.after;
    current.insert(step.after);
    out.push_back(current);
  }
  return out;
}

/// Checks that every chunk appears exactly once and every sequence sums to
/// at most L with items + pad == L.
inline bool is_partition(const PackingPlan& plan,
                         const std::vector<Chunk>& chunks) {
  if (plan.offsets.size() != plan.num_sequences() + 1) return false;
  if (plan.offsets.back() != plan.items.size()) return false;
  std::multiset<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> want;
  for (const auto& c : chunks) want.emplace(c.doc, c.start, c.end);
  std::multiset<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> got;
  for (std::size_t s = 0; s < plan.num_sequences(); ++s) {
    std::uint64_t used = 0;
    for (const auto& c : plan.sequence(s)) {
      used += c.length();
      got.emplace(c.doc, c.start, c.end);
    }
    if (used + plan.pads[s] != plan.max_seq_len) return false;
  }
  return want == got;
}

}  // namespace bfpack::testing

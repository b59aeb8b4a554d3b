#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bfpack {

/// Max segment tree over remaining-capacity values 1..L.
///
/// Leaf c holds c while some open bin has exactly c capacity left and 0
/// otherwise. Leaf L is permanently live and stands for the unbounded supply
/// of empty bins. Leaves are padded to a power of two; padded leaves stay 0,
/// so a descent that prefers the left child whenever it can hold the weight
/// ends at the smallest live capacity that fits.
class CapacityTree {
 public:
  static constexpr std::uint32_t kNotFound = 0;

  explicit CapacityTree(std::uint32_t capacity);

  std::uint32_t capacity() const { return capacity_; }

  /// Smallest live capacity >= weight, or kNotFound. Requires
  /// 1 <= weight <= capacity().
  std::uint32_t best_fit(std::uint32_t weight) const;

  /// As above, also reporting the number of nodes visited.
  std::uint32_t best_fit(std::uint32_t weight, std::size_t& visits) const;

  /// Marks capacity c live or dead. Clearing leaf L is a no-op.
  void set_capacity(std::uint32_t c, bool live);

  bool live(std::uint32_t c) const { return leaf(c) != 0; }
  std::uint32_t leaf(std::uint32_t c) const;
  std::uint32_t root() const { return nodes_[1]; }

  /// Number of leaves in the padded layout.
  std::size_t leaf_slots() const { return leaves_; }

  /// Raw heap layout: node 1 is the root, node i has children 2i and 2i+1.
  const std::vector<std::uint32_t>& nodes() const { return nodes_; }

 private:
  void check_capacity(std::uint32_t c) const;

  std::uint32_t capacity_;
  std::size_t leaves_;
  std::vector<std::uint32_t> nodes_;
};

}  // namespace bfpack

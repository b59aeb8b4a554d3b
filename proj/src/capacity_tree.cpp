#include "bfpack/capacity_tree.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "bfpack/corpus.hpp"
#include "bfpack/error.hpp"

namespace bfpack {

CapacityTree::CapacityTree(std::uint32_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw Error(ErrorKind::config, "capacity tree needs capacity >= 1");
  }
  if (capacity > kMaxSeqLen) {
    throw Error(ErrorKind::capacity, "capacity tree limited to " +
                                         std::to_string(kMaxSeqLen) + " leaves");
  }
  leaves_ = std::bit_ceil(static_cast<std::size_t>(capacity));
  nodes_.assign(2 * leaves_, 0);
  for (std::size_t node = leaves_ + capacity - 1; node >= 1; node /= 2) {
    nodes_[node] = capacity;
  }
}

void CapacityTree::check_capacity(std::uint32_t c) const {
  if (c == 0 || c > capacity_) {
    throw Error(ErrorKind::other, "capacity " + std::to_string(c) +
                                      " outside [1, " +
                                      std::to_string(capacity_) + "]");
  }
}

std::uint32_t CapacityTree::leaf(std::uint32_t c) const {
  check_capacity(c);
  return nodes_[leaves_ + c - 1];
}

std::uint32_t CapacityTree::best_fit(std::uint32_t weight) const {
  std::size_t visits = 0;
  return best_fit(weight, visits);
}

std::uint32_t CapacityTree::best_fit(std::uint32_t weight,
                                     std::size_t& visits) const {
  check_capacity(weight);
  std::size_t node = 1;
  visits = 1;
  if (nodes_[node] < weight) return kNotFound;
  while (node < leaves_) {
    node = nodes_[2 * node] >= weight ? 2 * node : 2 * node + 1;
    ++visits;
  }
  return nodes_[node];
}

void CapacityTree::set_capacity(std::uint32_t c, bool live) {
  check_capacity(c);
  if (c == capacity_) return;
  std::size_t node = leaves_ + c - 1;
  const std::uint32_t value = live ? c : 0;
  if (nodes_[node] == value) return;
  nodes_[node] = value;
  for (node /= 2; node >= 1; node /= 2) {
    const auto updated = std::max(nodes_[2 * node], nodes_[2 * node + 1]);
    if (nodes_[node] == updated) break;
    nodes_[node] = updated;
  }
}

}  // namespace bfpack

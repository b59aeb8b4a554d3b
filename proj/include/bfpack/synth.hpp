#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bfpack/corpus.hpp"

namespace bfpack {

/// Lognormal document lengths with median `median_fraction * L`, resampled
/// until they land in [1, max_multiple * L].
struct SynthSpec {
  std::uint32_t max_seq_len = 2048;
  double median_fraction = 0.15;
  double sigma = 1.0;
  std::uint32_t max_multiple = 64;
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

std::vector<Length> synth_lengths(const SynthSpec& spec, std::size_t count);

/// Lengths-only corpus over synth_lengths, ids "d0", "d1", ...
Corpus synth_corpus(const SynthSpec& spec, std::size_t count);

}  // namespace bfpack

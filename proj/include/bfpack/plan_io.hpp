#pragma once

#include <filesystem>
#include <iosfwd>

#include "bfpack/corpus.hpp"
#include "bfpack/packer.hpp"

namespace bfpack {

/// One line per sequence:
///   {"seq":0,"items":[{"doc":"a","start":0,"end":8}],"pad":0}
void write_plan(std::ostream& out, const PackingPlan& plan,
                const Corpus& corpus);

/// Reads a plan written by write_plan. Document ids are resolved against
/// `corpus`; each item's slice ordinal is recomputed from the offsets. Throws
/// a parse error for malformed lines and a capacity error for sequences that
/// do not sum to L.
PackingPlan read_plan(std::istream& in, const Corpus& corpus, Method method);
PackingPlan load_plan(const std::filesystem::path& path, const Corpus& corpus,
                      Method method);

/// Writes each sequence as L little-endian uint32 token ids, padding with
/// `pad_id`. Requires a token-ids corpus.
void materialize(std::ostream& out, const PackingPlan& plan,
                 const Corpus& corpus, TokenId pad_id = 0);

}  // namespace bfpack

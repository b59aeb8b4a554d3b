#include "bfpack/reference.hpp"

#include <algorithm>
#include <unordered_map>

#include "bfpack/error.hpp"
#include "record_parse.hpp"

namespace bfpack::reference {

std::vector<Document> parse_records(std::span<const std::string> lines,
                                    const CorpusOptions& options) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    auto r = detail::parse_line(lines[i], i + 1, options);
    if (!r.doc) throw Error(r.error_kind, r.error);
    const auto [it, inserted] = seen.emplace(r.doc->id, i + 1);
    if (!inserted) {
      throw Error(ErrorKind::parse,
                  detail::at_line(i + 1, "duplicate id '" + r.doc->id +
                                             "' (first seen on line " +
                                             std::to_string(it->second) + ")"));
    }
    docs.push_back(std::move(*r.doc));
  }
  return docs;
}

std::vector<Chunk> chunk_lengths(std::span<const Length> lengths,
                                 std::uint32_t max_seq_len) {
  std::vector<Chunk> out;
  for (std::size_t d = 0; d < lengths.size(); ++d) {
    std::uint32_t index = 0;
    for (Length start = 0; start < lengths[d]; start += max_seq_len) {
      const Length end = std::min<Length>(start + max_seq_len, lengths[d]);
      out.push_back(Chunk{static_cast<std::uint32_t>(d), index++,
                          static_cast<std::uint32_t>(start),
                          static_cast<std::uint32_t>(end)});
    }
  }
  return out;
}

std::vector<Chunk> sort_descending(std::span<const Chunk> chunks) {
  std::vector<Chunk> out(chunks.begin(), chunks.end());
  std::stable_sort(out.begin(), out.end(), [](const Chunk& a, const Chunk& b) {
    return a.length() > b.length();
  });
  return out;
}

std::map<Length, std::uint64_t> length_histogram(const Corpus& corpus) {
  std::map<Length, std::uint64_t> out;
  for (const auto& doc : corpus.documents()) ++out[doc.length];
  return out;
}

std::vector<std::uint64_t> cuts_per_document(const Corpus& corpus,
                                             Method method,
                                             bool drop_remainder) {
  const std::uint32_t L = corpus.max_seq_len();
  std::vector<std::uint64_t> cuts(corpus.size(), 0);
  if (method != Method::concat) {
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      cuts[d] = minimal_cuts(corpus[d].length, L);
    }
    return cuts;
  }
  const std::uint64_t total = corpus.total_tokens();
  const std::uint64_t limit = drop_remainder ? total / L * L : total;
  std::uint64_t start = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const std::uint64_t end = start + corpus[d].length;
    // Past the last kept sequence nothing of the document survives.
    cuts[d] = start >= limit ? 0 : concat_cuts(start, end, L);
    start = end;
  }
  return cuts;
}

std::vector<toy::ToyRow> toy_grid(std::span<const double> ps,
                                  std::uint32_t m_max) {
  std::vector<toy::ToyRow> rows;
  for (const double p : ps) {
    for (std::uint32_t m = 1; m <= m_max; ++m) {
      rows.push_back(toy::ToyRow{p, m, toy::model_a_loss(p),
                                 toy::model_b_expected_loss(p, m),
                                 toy::relative_increase(p, m)});
    }
  }
  return rows;
}

}  // namespace bfpack::reference

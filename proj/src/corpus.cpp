#include "bfpack/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "bfpack/error.hpp"
#include "record_parse.hpp"

namespace bfpack {

namespace {

using json = nlohmann::json;
using detail::at_line;
using detail::is_blank;
using detail::LineResult;
using detail::parse_line;

void check_options(const CorpusOptions& options) {
  if (options.max_seq_len == 0) {
    throw Error(ErrorKind::config, "max sequence length must be >= 1");
  }
  if (options.max_seq_len > kMaxSeqLen) {
    throw Error(ErrorKind::capacity,
                "max sequence length exceeds " + std::to_string(kMaxSeqLen));
  }
  if (options.sentinel && options.max_seq_len < 2) {
    throw Error(ErrorKind::config,
                "max sequence length must be >= 2 when a sentinel is used");
  }
}

}  // namespace

Corpus::Corpus(std::vector<Document> documents, std::uint32_t max_seq_len,
               bool sentinel, IngestMode mode)
    : documents_(std::move(documents)),
      max_seq_len_(max_seq_len),
      sentinel_(sentinel),
      mode_(mode) {
  CorpusOptions options;
  options.max_seq_len = max_seq_len;
  if (sentinel) options.sentinel = 0;
  check_options(options);

  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (doc.length == 0) {
      throw Error(ErrorKind::parse, "document '" + doc.id + "' is empty");
    }
    if (doc.length > kMaxDocumentLength) {
      throw Error(ErrorKind::capacity,
                  "document '" + doc.id + "' exceeds the length cap");
    }
    if (mode == IngestMode::token_ids && doc.tokens.size() != doc.length) {
      throw Error(ErrorKind::parse,
                  "document '" + doc.id + "' token count mismatch");
    }
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorKind::parse, "duplicate document id '" + doc.id + "'");
    }
    total_tokens_ += doc.length;
  }
}

Corpus Corpus::from_lengths(std::span<const Length> raw_lengths,
                            std::uint32_t max_seq_len, bool sentinel) {
  std::vector<Document> docs(raw_lengths.size());
  for (std::size_t i = 0; i < raw_lengths.size(); ++i) {
    docs[i].id = "d" + std::to_string(i);
    docs[i].length = raw_lengths[i] + (sentinel ? 1 : 0);
  }
  return Corpus(std::move(docs), max_seq_len, sentinel);
}

std::vector<Length> Corpus::lengths() const {
  std::vector<Length> out(documents_.size());
  std::transform(documents_.begin(), documents_.end(), out.begin(),
                 [](const Document& d) { return d.length; });
  return out;
}

std::vector<Document> parse_records(std::span<const std::string> lines,
                                    const CorpusOptions& options) {
  const auto n = static_cast<std::int64_t>(lines.size());
  std::vector<LineResult> results(lines.size());

#pragma omp parallel for schedule(dynamic, 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& line = lines[static_cast<std::size_t>(i)];
    if (is_blank(line)) continue;
    results[static_cast<std::size_t>(i)] =
        parse_line(line, static_cast<std::size_t>(i) + 1, options);
  }

  std::vector<Document> docs;
  docs.reserve(lines.size());
  std::unordered_map<std::string_view, std::size_t> first_seen;
  first_seen.reserve(lines.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (!r.error.empty()) throw Error(r.error_kind, r.error);
    if (!r.doc) continue;
    if (const auto it = first_seen.find(r.doc->id); it != first_seen.end()) {
      throw Error(ErrorKind::parse,
                  at_line(i + 1, "duplicate id '" + r.doc->id +
                                     "' (first seen on line " +
                                     std::to_string(it->second) + ")"));
    }
    // Keys view the ids stored in `docs`, which never reallocates here.
    docs.push_back(std::move(*r.doc));
    first_seen.emplace(docs.back().id, i + 1);
  }
  return docs;
}

Corpus read_corpus(std::istream& in, const CorpusOptions& options) {
  check_options(options);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  if (in.bad()) throw Error(ErrorKind::io, "failed reading corpus stream");

  auto docs = parse_records(lines, options);
  return Corpus(std::move(docs), options.max_seq_len,
                options.sentinel.has_value(), options.mode);
}

Corpus load_corpus(const std::filesystem::path& path,
                   const CorpusOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open corpus file " + path.string());
  }
  return read_corpus(in, options);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  const Length strip = corpus.sentinel() ? 1 : 0;
  for (const auto& doc : corpus.documents()) {
    json record;
    record["id"] = doc.id;
    if (corpus.mode() == IngestMode::token_ids) {
      record["tokens"] = std::vector<TokenId>(
          doc.tokens.begin(), doc.tokens.end() - static_cast<std::ptrdiff_t>(strip));
    } else {
      record["length"] = doc.length - strip;
    }
    out << record.dump() << '\n';
  }
}

std::map<Length, std::uint64_t> length_histogram(const Corpus& corpus) {
  const auto docs = corpus.documents();
  const auto n = static_cast<std::int64_t>(docs.size());
  std::map<Length, std::uint64_t> merged;

#pragma omp parallel
  {
    std::unordered_map<Length, std::uint64_t> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      ++local[docs[static_cast<std::size_t>(i)].length];
    }
#pragma omp critical(bfpack_length_histogram)
    for (const auto& [length, count] : local) merged[length] += count;
  }
  return merged;
}

}  // namespace bfpack

#include "bfpack/stats.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "bfpack/chunker.hpp"
#include "bfpack/error.hpp"

namespace bfpack {

namespace {

using ordered_json = nlohmann::ordered_json;

// Restores the OpenMP thread count on scope exit.
class SingleThreaded {
 public:
  SingleThreaded() : saved_(omp_get_max_threads()) { omp_set_num_threads(1); }
  ~SingleThreaded() { omp_set_num_threads(saved_); }
  SingleThreaded(const SingleThreaded&) = delete;
  SingleThreaded& operator=(const SingleThreaded&) = delete;

 private:
  int saved_;
};

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

CompactnessReport make_compactness(Method method, std::uint32_t max_seq_len,
                                   std::uint64_t num_sequences,
                                   std::uint64_t num_padding_tokens,
                                   std::optional<std::uint64_t> concat_sequences) {
  CompactnessReport r;
  r.method = method;
  r.max_seq_len = max_seq_len;
  r.num_sequences = num_sequences;
  r.num_padding_tokens = num_padding_tokens;
  const double slots =
      static_cast<double>(num_sequences) * static_cast<double>(max_seq_len);
  r.padding_fraction =
      num_sequences == 0 ? 0.0 : static_cast<double>(num_padding_tokens) / slots;
  if (concat_sequences) {
    r.concat_sequences = *concat_sequences;
    const auto delta = static_cast<std::int64_t>(num_sequences) -
                       static_cast<std::int64_t>(*concat_sequences);
    r.delta_vs_concat = delta;
    r.delta_pct = *concat_sequences == 0
                      ? 0.0
                      : 100.0 * static_cast<double>(delta) /
                            static_cast<double>(*concat_sequences);
  }
  return r;
}

CompactnessReport compactness(const PackingPlan& plan,
                              const PackingPlan* concat_ref) {
  std::optional<std::uint64_t> reference;
  if (concat_ref) {
    if (concat_ref->max_seq_len != plan.max_seq_len) {
      throw Error(ErrorKind::config, "plans were built with different L");
    }
    if (concat_ref->source_tokens != plan.source_tokens) {
      throw Error(ErrorKind::config, "plans were built from different corpora");
    }
    reference = concat_ref->num_sequences();
  }
  return make_compactness(plan.method, plan.max_seq_len, plan.num_sequences(),
                          plan.total_padding(), reference);
}

std::vector<std::uint64_t> cuts_per_document(const PackingPlan& plan,
                                             const Corpus& corpus) {
  if (plan.max_seq_len != corpus.max_seq_len()) {
    throw Error(ErrorKind::config, "plan and corpus disagree on L");
  }
  if (plan.source_tokens != corpus.total_tokens()) {
    throw Error(ErrorKind::config, "plan was not built from this corpus");
  }
  const std::size_t docs = corpus.size();

  // Group slice positions by document (CSR, stable).
  std::vector<std::size_t> offsets(docs + 1, 0);
  for (const auto& c : plan.items) {
    if (c.doc >= docs) {
      throw Error(ErrorKind::config, "plan references an unknown document");
    }
    ++offsets[c.doc + 1];
  }
  for (std::size_t d = 0; d < docs; ++d) offsets[d + 1] += offsets[d];
  std::vector<Chunk> slices(plan.items.size());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& c : plan.items) slices[cursor[c.doc]++] = c;
  }

  const bool may_drop =
      plan.method == Method::concat && plan.covered_tokens() < plan.source_tokens;
  std::vector<std::uint64_t> cuts(docs, 0);
  std::size_t first_bad = std::numeric_limits<std::size_t>::max();
  const auto n = static_cast<std::int64_t>(docs);

#pragma omp parallel for schedule(dynamic, 1024) reduction(min : first_bad)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto d = static_cast<std::size_t>(i);
    auto begin = slices.begin() + static_cast<std::ptrdiff_t>(offsets[d]);
    auto end = slices.begin() + static_cast<std::ptrdiff_t>(offsets[d + 1]);
    std::sort(begin, end, [](const Chunk& a, const Chunk& b) {
      return a.start < b.start;
    });
    std::uint64_t covered = 0;
    bool ok = true;
    for (auto it = begin; it != end; ++it) {
      if (it->start != covered || it->end <= it->start) {
        ok = false;
        break;
      }
      covered = it->end;
    }
    const Length length = corpus[d].length;
    if (!ok || covered > length || (covered < length && !may_drop)) {
      first_bad = std::min(first_bad, d);
      continue;
    }
    const auto pieces = static_cast<std::uint64_t>(end - begin);
    cuts[d] = pieces == 0 ? 0 : pieces - 1 + (covered < length ? 1 : 0);
  }

  if (first_bad != std::numeric_limits<std::size_t>::max()) {
    throw Error(ErrorKind::config, "plan does not tile document '" +
                                       corpus[first_bad].id + "'");
  }
  return cuts;
}

TruncationReport truncations(const PackingPlan& plan, const Corpus& corpus) {
  const auto cuts = cuts_per_document(plan, corpus);
  std::map<Length, TruncationRow> rows;
  TruncationReport r;
  r.method = plan.method;
  r.max_seq_len = plan.max_seq_len;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    auto& row = rows[corpus[d].length];
    row.length = corpus[d].length;
    ++row.doc_count;
    row.truncations += cuts[d];
    r.total_truncations += cuts[d];
    if (cuts[d] > 0) ++r.truncated_documents;
  }
  r.rows.reserve(rows.size());
  for (auto& [length, row] : rows) r.rows.push_back(row);
  return r;
}

ScalingReport bench_scaling(const SynthSpec& generator,
                            std::span<const std::uint64_t> sizes,
                            unsigned repetitions) {
  if (repetitions == 0) {
    throw Error(ErrorKind::config, "bench needs at least one repetition");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw Error(ErrorKind::config, "bench sizes must be strictly increasing");
    }
  }

  ScalingReport report;
  report.generator = generator;
  report.repetitions = repetitions;
  SingleThreaded guard;
  for (const auto n : sizes) {
    ScalingRow row;
    row.documents = n;
    std::vector<Chunk> chunks;
    {
      const auto lengths = synth_lengths(generator, n);
      chunks = chunk_lengths(lengths, generator.max_seq_len);
    }
    row.chunks = chunks.size();
    row.obfd_seconds = std::numeric_limits<double>::infinity();
    row.ffd_seconds = std::numeric_limits<double>::infinity();
    for (unsigned rep = 0; rep < repetitions; ++rep) {
      row.obfd_seconds = std::min(row.obfd_seconds, seconds([&] {
        row.obfd_sequences =
            pack_bfd_optimized(chunks, generator.max_seq_len).num_sequences();
      }));
      row.ffd_seconds = std::min(row.ffd_seconds, seconds([&] {
        row.ffd_sequences =
            pack_ffd(chunks, generator.max_seq_len).num_sequences();
      }));
    }
    row.below_resolution = row.obfd_seconds < 1e-3 || row.ffd_seconds < 1e-3;
    row.speedup =
        row.obfd_seconds > 0.0 ? row.ffd_seconds / row.obfd_seconds : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

void to_json(ordered_json& j, const CompactnessReport& r) {
  j = ordered_json{{"method", to_string(r.method)},
                   {"max_seq_len", r.max_seq_len},
                   {"num_sequences", r.num_sequences},
                   {"num_padding_tokens", r.num_padding_tokens},
                   {"padding_fraction", r.padding_fraction}};
  if (r.concat_sequences) j["concat_sequences"] = *r.concat_sequences;
  if (r.delta_vs_concat) j["delta_vs_concat"] = *r.delta_vs_concat;
  if (r.delta_pct) j["delta_pct"] = *r.delta_pct;
}

void from_json(const ordered_json& j, CompactnessReport& r) {
  r.method = parse_method(j.at("method").get<std::string>());
  j.at("max_seq_len").get_to(r.max_seq_len);
  j.at("num_sequences").get_to(r.num_sequences);
  j.at("num_padding_tokens").get_to(r.num_padding_tokens);
  j.at("padding_fraction").get_to(r.padding_fraction);
  r.concat_sequences.reset();
  r.delta_vs_concat.reset();
  r.delta_pct.reset();
  if (j.contains("concat_sequences")) {
    r.concat_sequences = j["concat_sequences"].get<std::uint64_t>();
  }
  if (j.contains("delta_vs_concat")) {
    r.delta_vs_concat = j["delta_vs_concat"].get<std::int64_t>();
  }
  if (j.contains("delta_pct")) r.delta_pct = j["delta_pct"].get<double>();
}

void to_json(ordered_json& j, const TruncationReport& r) {
  auto rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back(ordered_json{{"length", row.length},
                                {"doc_count", row.doc_count},
                                {"truncations", row.truncations}});
  }
  j = ordered_json{{"method", to_string(r.method)},
                   {"max_seq_len", r.max_seq_len},
                   {"total_truncations", r.total_truncations},
                   {"truncated_documents", r.truncated_documents},
                   {"rows", std::move(rows)}};
}

void from_json(const ordered_json& j, TruncationReport& r) {
  r.method = parse_method(j.at("method").get<std::string>());
  j.at("max_seq_len").get_to(r.max_seq_len);
  j.at("total_truncations").get_to(r.total_truncations);
  j.at("truncated_documents").get_to(r.truncated_documents);
  r.rows.clear();
  for (const auto& row : j.at("rows")) {
    r.rows.push_back(TruncationRow{row.at("length").get<Length>(),
                                   row.at("doc_count").get<std::uint64_t>(),
                                   row.at("truncations").get<std::uint64_t>()});
  }
}

void to_json(ordered_json& j, const ScalingReport& r) {
  auto rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back(ordered_json{{"documents", row.documents},
                                {"chunks", row.chunks},
                                {"obfd_seconds", row.obfd_seconds},
                                {"ffd_seconds", row.ffd_seconds},
                                {"speedup", row.speedup},
                                {"below_resolution", row.below_resolution},
                                {"obfd_sequences", row.obfd_sequences},
                                {"ffd_sequences", row.ffd_sequences}});
  }
  const auto& g = r.generator;
  j = ordered_json{{"generator",
                    {{"max_seq_len", g.max_seq_len},
                     {"median_fraction", g.median_fraction},
                     {"sigma", g.sigma},
                     {"max_multiple", g.max_multiple},
                     {"seed", g.seed}}},
                   {"repetitions", r.repetitions},
                   {"rows", std::move(rows)}};
}

void from_json(const ordered_json& j, ScalingReport& r) {
  const auto& g = j.at("generator");
  g.at("max_seq_len").get_to(r.generator.max_seq_len);
  g.at("median_fraction").get_to(r.generator.median_fraction);
  g.at("sigma").get_to(r.generator.sigma);
  g.at("max_multiple").get_to(r.generator.max_multiple);
  g.at("seed").get_to(r.generator.seed);
  j.at("repetitions").get_to(r.repetitions);
  r.rows.clear();
  for (const auto& row : j.at("rows")) {
    ScalingRow out;
    row.at("documents").get_to(out.documents);
    row.at("chunks").get_to(out.chunks);
    row.at("obfd_seconds").get_to(out.obfd_seconds);
    row.at("ffd_seconds").get_to(out.ffd_seconds);
    row.at("speedup").get_to(out.speedup);
    row.at("below_resolution").get_to(out.below_resolution);
    row.at("obfd_sequences").get_to(out.obfd_sequences);
    row.at("ffd_sequences").get_to(out.ffd_sequences);
    r.rows.push_back(out);
  }
}

std::string to_text(const CompactnessReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "method" << to_string(r.method) << '\n'
     << std::setw(22) << "max_seq_len" << r.max_seq_len << '\n'
     << std::setw(22) << "sequences" << r.num_sequences << '\n'
     << std::setw(22) << "padding_tokens" << r.num_padding_tokens << '\n'
     << std::setw(22) << "padding_fraction" << std::setprecision(6)
     << r.padding_fraction << '\n';
  if (r.concat_sequences) {
    os << std::setw(22) << "concat_sequences" << *r.concat_sequences << '\n'
       << std::setw(22) << "delta_vs_concat" << *r.delta_vs_concat << '\n'
       << std::setw(22) << "delta_pct" << *r.delta_pct << "%\n";
  }
  return os.str();
}

std::string to_text(const TruncationReport& r) {
  std::ostringstream os;
  os << "method " << to_string(r.method) << ", L = " << r.max_seq_len
     << ", total truncations " << r.total_truncations << ", truncated documents "
     << r.truncated_documents << '\n';
  os << std::right << std::setw(12) << "length" << std::setw(14) << "documents"
     << std::setw(14) << "truncations" << '\n';
  for (const auto& row : r.rows) {
    os << std::setw(12) << row.length << std::setw(14) << row.doc_count
       << std::setw(14) << row.truncations << '\n';
  }
  return os.str();
}

std::string to_text(const ScalingReport& r) {
  std::ostringstream os;
  os << "L = " << r.generator.max_seq_len << ", seed " << r.generator.seed
     << ", min of " << r.repetitions << " runs\n";
  os << std::right << std::setw(12) << "documents" << std::setw(12) << "chunks"
     << std::setw(12) << "obfd_s" << std::setw(12) << "ffd_s" << std::setw(10)
     << "ffd/obfd" << '\n';
  os << std::fixed;
  for (const auto& row : r.rows) {
    os << std::setw(12) << row.documents << std::setw(12) << row.chunks
       << std::setw(12) << std::setprecision(4) << row.obfd_seconds
       << std::setw(12) << row.ffd_seconds << std::setw(10)
       << std::setprecision(2) << row.speedup
       << (row.below_resolution ? "  (below timer resolution)" : "") << '\n';
  }
  return os.str();
}

void write_truncation_csv(std::ostream& out, const TruncationReport& r) {
  out << "length,doc_count,truncations\n";
  for (const auto& row : r.rows) {
    out << row.length << ',' << row.doc_count << ',' << row.truncations << '\n';
  }
}

}  // namespace bfpack

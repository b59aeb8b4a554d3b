#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfpack/corpus.hpp"
#include "bfpack/packer.hpp"
#include "bfpack/synth.hpp"

namespace bfpack {

struct CompactnessReport {
  Method method = Method::bfd_optimized;
  std::uint32_t max_seq_len = 0;
  std::uint64_t num_sequences = 0;
  std::uint64_t num_padding_tokens = 0;
  /// pad / (M * L), 0 for an empty plan.
  double padding_fraction = 0.0;
  /// Present only when a concatenation reference was supplied.
  std::optional<std::uint64_t> concat_sequences;
  std::optional<std::int64_t> delta_vs_concat;
  /// 100 * delta / M_concat, i.e. already in percent.
  std::optional<double> delta_pct;

  friend bool operator==(const CompactnessReport&,
                         const CompactnessReport&) = default;
};

CompactnessReport make_compactness(Method method, std::uint32_t max_seq_len,
                                   std::uint64_t num_sequences,
                                   std::uint64_t num_padding_tokens,
                                   std::optional<std::uint64_t> concat_sequences);

/// Throws when the plans disagree on L or on the source token count.
CompactnessReport compactness(const PackingPlan& plan,
                              const PackingPlan* concat_ref = nullptr);

struct TruncationRow {
  Length length = 0;
  std::uint64_t doc_count = 0;
  std::uint64_t truncations = 0;

  friend bool operator==(const TruncationRow&, const TruncationRow&) = default;
};

struct TruncationReport {
  Method method = Method::bfd_optimized;
  std::uint32_t max_seq_len = 0;
  /// Ascending by length.
  std::vector<TruncationRow> rows;
  std::uint64_t total_truncations = 0;
  std::uint64_t truncated_documents = 0;

  friend bool operator==(const TruncationReport&,
                         const TruncationReport&) = default;
};

/// Cuts suffered by each document under `plan`: slices found minus one, plus
/// one more when the document's tail was dropped. Validates that the slices
/// of every document tile it without gaps or overlaps.
std::vector<std::uint64_t> cuts_per_document(const PackingPlan& plan,
                                             const Corpus& corpus);

TruncationReport truncations(const PackingPlan& plan, const Corpus& corpus);

struct ScalingRow {
  std::uint64_t documents = 0;
  std::uint64_t chunks = 0;
  double obfd_seconds = 0.0;
  double ffd_seconds = 0.0;
  /// ffd_seconds / obfd_seconds.
  double speedup = 0.0;
  /// Set when either timing is under a millisecond.
  bool below_resolution = false;
  std::uint64_t obfd_sequences = 0;
  std::uint64_t ffd_sequences = 0;

  friend bool operator==(const ScalingRow&, const ScalingRow&) = default;
};

struct ScalingReport {
  SynthSpec generator;
  unsigned repetitions = 0;
  std::vector<ScalingRow> rows;

  friend bool operator==(const ScalingReport&, const ScalingReport&) = default;
};

/// Times single-threaded sort+pack for optimized BFD and FFD on identical
/// synthetic inputs; each timing is the minimum over `repetitions` runs.
/// `sizes` must be strictly increasing.
ScalingReport bench_scaling(const SynthSpec& generator,
                            std::span<const std::uint64_t> sizes,
                            unsigned repetitions = 3);

void to_json(nlohmann::ordered_json& j, const CompactnessReport& r);
void from_json(const nlohmann::ordered_json& j, CompactnessReport& r);
void to_json(nlohmann::ordered_json& j, const TruncationReport& r);
void from_json(const nlohmann::ordered_json& j, TruncationReport& r);
void to_json(nlohmann::ordered_json& j, const ScalingReport& r);
void from_json(const nlohmann::ordered_json& j, ScalingReport& r);

std::string to_text(const CompactnessReport& r);
std::string to_text(const TruncationReport& r);
std::string to_text(const ScalingReport& r);

/// `length,doc_count,truncations` with a header row.
void write_truncation_csv(std::ostream& out, const TruncationReport& r);

}  // namespace bfpack

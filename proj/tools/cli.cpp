#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfpack/chunker.hpp"
#include "bfpack/corpus.hpp"
#include "bfpack/error.hpp"
#include "bfpack/packer.hpp"
#include "bfpack/plan_io.hpp"
#include "bfpack/stats.hpp"
#include "bfpack/synth.hpp"
#include "bfpack/toyproc.hpp"

namespace bfpack::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  std::string input;
  std::string plan;
  std::string out;
  std::uint32_t max_seq_len = 2048;
  std::optional<TokenId> sentinel;
  TokenId pad_id = 0;
  std::string mode = "lengths";
  std::string method = "bfd";
  bool drop_remainder = false;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> sizes{1'000'000, 10'000'000};
  unsigned repetitions = 3;
  std::vector<double> p_grid{0.55, 0.6, 0.75, 0.9};
  std::uint32_t m_max = 200;
};

// Writes to "<path>.tmp" and renames on commit; an uncommitted file is
// removed, so a failed run leaves no partial output behind.
class OutputFile {
 public:
  explicit OutputFile(fs::path path, std::ios::openmode mode = std::ios::out)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    stream_.open(tmp_, mode | std::ios::trunc);
    if (!stream_) throw Error(ErrorKind::io, "cannot write " + tmp_.string());
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;
  ~OutputFile() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return stream_; }

  void commit() {
    stream_.close();
    if (!stream_) throw Error(ErrorKind::io, "failed writing " + tmp_.string());
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream stream_;
  bool committed_ = false;
};

IngestMode parse_mode(const std::string& mode) {
  if (mode == "lengths" || mode == "lengths-only") return IngestMode::lengths_only;
  if (mode == "tokens" || mode == "token-ids") return IngestMode::token_ids;
  throw Error(ErrorKind::config, "unknown mode '" + mode + "'");
}

Corpus load(const RunConfig& cfg, std::optional<IngestMode> force_mode = {}) {
  CorpusOptions options;
  options.mode = force_mode ? *force_mode : parse_mode(cfg.mode);
  options.max_seq_len = cfg.max_seq_len;
  options.sentinel = cfg.sentinel;
  return load_corpus(cfg.input, options);
}

fs::path output_dir(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error(ErrorKind::config, "--out is required");
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
  }
  return dir;
}

struct Reports {
  CompactnessReport compactness;
  TruncationReport truncation;
};

Reports build_reports(const PackingPlan& plan, const Corpus& corpus) {
  Reports r;
  if (plan.method == Method::concat) {
    r.compactness = compactness(plan);
  } else {
    const auto reference = pack_concat(corpus);
    r.compactness = compactness(plan, &reference);
  }
  r.truncation = truncations(plan, corpus);
  return r;
}

void write_reports(const fs::path& dir, const Reports& r) {
  OutputFile json_file(dir / "report.json");
  OutputFile text_file(dir / "report.txt");
  OutputFile csv_file(dir / "truncation.csv");

  ordered_json j;
  j["compactness"] = r.compactness;
  j["truncation"] = r.truncation;
  json_file.stream() << j.dump(2) << '\n';
  text_file.stream() << to_text(r.compactness) << '\n'
                     << to_text(r.truncation);
  write_truncation_csv(csv_file.stream(), r.truncation);

  json_file.commit();
  text_file.commit();
  csv_file.commit();
}

void summarize(std::ostream& out, const Reports& r) {
  out << to_string(r.compactness.method) << ": "
      << r.compactness.num_sequences << " sequences, "
      << r.compactness.num_padding_tokens << " padding tokens, "
      << r.truncation.total_truncations << " truncations over "
      << r.truncation.truncated_documents << " documents\n";
}

int run_pack(const RunConfig& cfg, Method method, std::ostream& out) {
  const auto corpus = load(cfg);
  const auto chunks = chunk_corpus(corpus);
  const auto plan = pack(method, corpus, chunks, cfg.drop_remainder);
  const auto dir = output_dir(cfg);
  const auto reports = build_reports(plan, corpus);

  OutputFile plan_file(dir / "plan.jsonl");
  write_plan(plan_file.stream(), plan, corpus);
  write_reports(dir, reports);
  plan_file.commit();
  summarize(out, reports);
  return 0;
}

int run_stats(const RunConfig& cfg, std::ostream& out) {
  const auto corpus = load(cfg);
  const auto plan = load_plan(cfg.plan, corpus, parse_method(cfg.method));
  const auto reports = build_reports(plan, corpus);
  write_reports(output_dir(cfg), reports);
  summarize(out, reports);
  return 0;
}

int run_materialize(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorKind::config, "--out is required");
  const auto corpus = load(cfg, IngestMode::token_ids);
  const auto plan = load_plan(cfg.plan, corpus, parse_method(cfg.method));
  OutputFile bin(cfg.out, std::ios::out | std::ios::binary);
  materialize(bin.stream(), plan, corpus, cfg.pad_id);
  bin.commit();
  out << "wrote " << plan.num_sequences() << " sequences of "
      << plan.max_seq_len << " tokens to " << cfg.out << '\n';
  return 0;
}

int run_bench(const RunConfig& cfg, std::ostream& out) {
  SynthSpec spec;
  spec.max_seq_len = cfg.max_seq_len;
  spec.seed = cfg.seed;
  const auto report = bench_scaling(spec, cfg.sizes, cfg.repetitions);
  out << to_text(report);
  if (!cfg.out.empty()) {
    OutputFile file(cfg.out);
    file.stream() << ordered_json(report).dump(2) << '\n';
    file.commit();
  }
  return 0;
}

int run_toy(const RunConfig& cfg, std::ostream& out) {
  const auto rows = toy::toy_grid(cfg.p_grid, cfg.m_max);
  if (cfg.out.empty()) {
    toy::write_toy_csv(out, rows);
  } else {
    OutputFile file(cfg.out);
    toy::write_toy_csv(file.stream(), rows);
    file.commit();
  }
  return 0;
}

void add_corpus_options(CLI::App* sub, RunConfig& cfg, bool with_mode) {
  sub->add_option("input", cfg.input, "Line-delimited corpus records")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--max-seq-len,-L", cfg.max_seq_len, "Sequence length L")
      ->check(CLI::Range(1u, kMaxSeqLen));
  sub->add_flag("--sentinel{0}", cfg.sentinel,
                "Append one sentinel token per document (optional token id)");
  if (with_mode) {
    sub->add_option("--mode", cfg.mode, "lengths | token-ids")
        ->check(CLI::IsMember({"lengths", "lengths-only", "tokens", "token-ids"}));
  }
}

std::vector<std::string> method_names() {
  return {"bfd", "bfd-naive", "ffd", "concat", "optimal"};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Best-fit packing of tokenized documents into training sequences"};
  app.name("bfpack");
  app.require_subcommand(1);

  auto* pack_cmd = app.add_subcommand("pack", "Chunk and pack a corpus into a plan");
  add_corpus_options(pack_cmd, cfg, true);
  pack_cmd->add_option("--method", cfg.method, "Grouping method")
      ->check(CLI::IsMember(method_names()));
  pack_cmd->add_flag("--drop-remainder", cfg.drop_remainder,
                     "Drop the final partial sequence (concat only)");
  pack_cmd->add_option("--out,-o", cfg.out, "Output directory")->required();

  auto* concat_cmd =
      app.add_subcommand("concat", "Concatenate-then-split baseline plan");
  add_corpus_options(concat_cmd, cfg, true);
  concat_cmd->add_flag("--drop-remainder", cfg.drop_remainder,
                       "Drop the final partial sequence");
  concat_cmd->add_option("--out,-o", cfg.out, "Output directory")->required();

  auto* mat_cmd = app.add_subcommand(
      "materialize", "Write a plan's sequences as little-endian uint32 rows");
  add_corpus_options(mat_cmd, cfg, false);
  mat_cmd->add_option("--plan", cfg.plan, "Plan file")
      ->required()
      ->check(CLI::ExistingFile);
  mat_cmd->add_option("--pad-id", cfg.pad_id, "Padding token id");
  mat_cmd->add_option("--out,-o", cfg.out, "Binary output file")->required();

  auto* stats_cmd =
      app.add_subcommand("stats", "Recompute reports for an existing plan");
  add_corpus_options(stats_cmd, cfg, true);
  stats_cmd->add_option("--plan", cfg.plan, "Plan file")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--method", cfg.method, "Method that produced the plan")
      ->check(CLI::IsMember(method_names()));
  stats_cmd->add_option("--out,-o", cfg.out, "Output directory")->required();

  auto* bench_cmd =
      app.add_subcommand("bench", "Time optimized BFD against FFD");
  bench_cmd->add_option("--sizes", cfg.sizes, "Document counts, ascending")
      ->delimiter(',');
  bench_cmd->add_option("--max-seq-len,-L", cfg.max_seq_len, "Sequence length L")
      ->check(CLI::Range(1u, kMaxSeqLen));
  bench_cmd->add_option("--seed", cfg.seed, "Generator seed");
  bench_cmd->add_option("--reps", cfg.repetitions, "Runs per timing (minimum kept)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out,-o", cfg.out, "JSON report file");

  auto* toy_cmd =
      app.add_subcommand("toy", "Loss curves of the truncation toy process");
  toy_cmd->add_option("--p-grid", cfg.p_grid, "Values of p in [0.5, 1)")
      ->delimiter(',');
  toy_cmd->add_option("--m-max", cfg.m_max, "Largest token position")
      ->check(CLI::Range(1u, toy::kDefaultMaxPosition));
  toy_cmd->add_option("--out,-o", cfg.out, "CSV file (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (pack_cmd->parsed()) return run_pack(cfg, parse_method(cfg.method), out);
    if (concat_cmd->parsed()) return run_pack(cfg, Method::concat, out);
    if (mat_cmd->parsed()) return run_materialize(cfg, out);
    if (stats_cmd->parsed()) return run_stats(cfg, out);
    if (bench_cmd->parsed()) return run_bench(cfg, out);
    if (toy_cmd->parsed()) return run_toy(cfg, out);
  } catch (const Error& e) {
    err << "bfpack: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "bfpack: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace bfpack::cli

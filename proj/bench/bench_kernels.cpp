// OpenMP kernels against their serial references, and the three packers.
// Thread count follows OMP_NUM_THREADS.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "bfpack/chunker.hpp"
#include "bfpack/corpus.hpp"
#include "bfpack/packer.hpp"
#include "bfpack/reference.hpp"
#include "bfpack/synth.hpp"
#include "bfpack/toyproc.hpp"

namespace {

using namespace bfpack;

constexpr std::uint32_t kL = 2048;

std::vector<Length> lengths_for(std::size_t n) {
  SynthSpec spec;
  spec.max_seq_len = kL;
  return synth_lengths(spec, n);
}

std::vector<std::string> lines_for(std::size_t n) {
  std::vector<std::string> lines;
  lines.reserve(n);
  const auto lengths = lengths_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    lines.push_back("{\"id\":\"d" + std::to_string(i) + "\",\"length\":" +
                    std::to_string(lengths[i]) + "}");
  }
  return lines;
}

void BM_ParseParallel(benchmark::State& state) {
  const auto lines = lines_for(static_cast<std::size_t>(state.range(0)));
  CorpusOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(parse_records(lines, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParseSerial(benchmark::State& state) {
  const auto lines = lines_for(static_cast<std::size_t>(state.range(0)));
  CorpusOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(reference::parse_records(lines, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ChunkParallel(benchmark::State& state) {
  const auto lengths = lengths_for(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(chunk_lengths(lengths, kL));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ChunkSerial(benchmark::State& state) {
  const auto lengths = lengths_for(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::chunk_lengths(lengths, kL));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SortCounting(benchmark::State& state) {
  const auto chunks = chunk_lengths(lengths_for(static_cast<std::size_t>(state.range(0))), kL);
  for (auto _ : state) benchmark::DoNotOptimize(sort_descending(chunks, kL));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chunks.size()));
}

void BM_SortStable(benchmark::State& state) {
  const auto chunks = chunk_lengths(lengths_for(static_cast<std::size_t>(state.range(0))), kL);
  for (auto _ : state) benchmark::DoNotOptimize(reference::sort_descending(chunks));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chunks.size()));
}

void BM_HistogramParallel(benchmark::State& state) {
  const auto corpus = Corpus::from_lengths(lengths_for(static_cast<std::size_t>(state.range(0))), kL);
  for (auto _ : state) benchmark::DoNotOptimize(length_histogram(corpus));
}

void BM_HistogramSerial(benchmark::State& state) {
  const auto corpus = Corpus::from_lengths(lengths_for(static_cast<std::size_t>(state.range(0))), kL);
  for (auto _ : state) benchmark::DoNotOptimize(reference::length_histogram(corpus));
}

const std::vector<double> kPs{0.55, 0.6, 0.75, 0.9};

void BM_ToyGridParallel(benchmark::State& state) {
  const auto m_max = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(toy::toy_grid(kPs, m_max));
}

void BM_ToyGridSerial(benchmark::State& state) {
  const auto m_max = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::toy_grid(kPs, m_max));
}

template <PackingPlan (*Pack)(std::span<const Chunk>, std::uint32_t, PackTrace*)>
void BM_Pack(benchmark::State& state) {
  const auto chunks = chunk_lengths(lengths_for(static_cast<std::size_t>(state.range(0))), kL);
  for (auto _ : state) benchmark::DoNotOptimize(Pack(chunks, kL, nullptr));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chunks.size()));
}

}  // namespace

BENCHMARK(BM_ParseParallel)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParseSerial)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChunkParallel)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChunkSerial)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SortCounting)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SortStable)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramParallel)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramSerial)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ToyGridParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ToyGridSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pack<pack_bfd_optimized>)->Name("BM_PackOptimizedBfd")->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pack<pack_ffd>)->Name("BM_PackFfd")->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pack<pack_bfd_naive>)->Name("BM_PackNaiveBfd")->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

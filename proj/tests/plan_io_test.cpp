#include "bfpack/plan_io.hpp"

#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bfpack/error.hpp"
#include "bfpack/synth.hpp"

namespace bfpack {
namespace {

const std::vector<Length> kFiveDocs{14, 7, 5, 2, 3};

PackingPlan round_trip(const PackingPlan& plan, const Corpus& corpus) {
  std::stringstream buf;
  write_plan(buf, plan, corpus);
  return read_plan(buf, corpus, plan.method);
}

ErrorKind read_error(const std::string& text, const Corpus& corpus) {
  std::istringstream in(text);
  try {
    read_plan(in, corpus, Method::bfd_optimized);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::other;
}

TEST(WritePlan, LineFormat) {
  const auto corpus = Corpus::from_lengths(kFiveDocs, 8);
  const auto plan = pack_bfd_optimized(chunk_corpus(corpus).chunks, 8);
  std::ostringstream out;
  write_plan(out, plan, corpus);
  EXPECT_EQ(out.str(),
            "{\"seq\":0,\"items\":[{\"doc\":\"d0\",\"start\":0,\"end\":8}],\"pad\":0}\n"
            "{\"seq\":1,\"items\":[{\"doc\":\"d1\",\"start\":0,\"end\":7}],\"pad\":1}\n"
            "{\"seq\":2,\"items\":[{\"doc\":\"d0\",\"start\":8,\"end\":14},"
            "{\"doc\":\"d3\",\"start\":0,\"end\":2}],\"pad\":0}\n"
            "{\"seq\":3,\"items\":[{\"doc\":\"d2\",\"start\":0,\"end\":5},"
            "{\"doc\":\"d4\",\"start\":0,\"end\":3}],\"pad\":0}\n");
}

TEST(ReadPlan, RoundTripsEveryMethod) {
  const auto corpus = Corpus::from_lengths(kFiveDocs, 8);
  const auto chunks = chunk_corpus(corpus);
  for (const auto m : {Method::bfd_optimized, Method::ffd, Method::concat}) {
    const auto plan = pack(m, corpus, chunks);
    EXPECT_EQ(round_trip(plan, corpus), plan) << to_string(m);
  }
  const auto dropped = pack_concat(corpus, true);
  EXPECT_EQ(round_trip(dropped, corpus), dropped);
  EXPECT_EQ(round_trip(pack_concat(Corpus{}), Corpus{}).num_sequences(), 0u);
}

TEST(ReadPlan, RoundTripsSyntheticCorpus) {
  SynthSpec spec;
  spec.max_seq_len = 64;
  spec.seed = 9;
  const auto corpus = synth_corpus(spec, 2000);
  const auto plan = pack_bfd_optimized(chunk_corpus(corpus).chunks, 64);
  EXPECT_EQ(round_trip(plan, corpus), plan);
}

TEST(ReadPlan, Errors) {
  const auto corpus = Corpus::from_lengths(kFiveDocs, 8);
  EXPECT_EQ(read_error("{oops\n", corpus), ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":1,\"items\":[],\"pad\":8}\n", corpus), ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":0,\"pad\":8}\n", corpus), ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":0,\"items\":[{\"doc\":\"zz\",\"start\":0,\"end\":1}],"
                       "\"pad\":7}\n",
                       corpus),
            ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":0,\"items\":[{\"doc\":\"d1\",\"start\":3,\"end\":3}],"
                       "\"pad\":8}\n",
                       corpus),
            ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":0,\"items\":[{\"doc\":\"d1\",\"start\":0,\"end\":9}],"
                       "\"pad\":0}\n",
                       corpus),
            ErrorKind::parse);
  EXPECT_EQ(read_error("{\"seq\":0,\"items\":[{\"doc\":\"d1\",\"start\":0,\"end\":7}],"
                       "\"pad\":0}\n",
                       corpus),
            ErrorKind::capacity);
}

TEST(ReadPlan, ReportsLineNumber) {
  const auto corpus = Corpus::from_lengths(kFiveDocs, 8);
  std::istringstream in("{\"seq\":0,\"items\":[],\"pad\":8}\n\nnot json\n");
  try {
    read_plan(in, corpus, Method::bfd_optimized);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadPlan, MissingFile) {
  try {
    load_plan("/nonexistent/plan.jsonl", Corpus{}, Method::bfd_optimized);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

std::vector<std::uint32_t> decode(const std::string& bytes) {
  // Explicit little-endian decode, independent of host byte order.
  std::vector<std::uint32_t> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + 4 * i);
    out[i] = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  return out;
}

TEST(Materialize, WritesRowsWithSentinelAndPad) {
  CorpusOptions opts;
  opts.mode = IngestMode::token_ids;
  opts.max_seq_len = 4;
  opts.sentinel = 7;
  std::istringstream src(
      "{\"id\":\"a\",\"tokens\":[1,2,3,4]}\n"
      "{\"id\":\"b\",\"tokens\":[65536]}\n");
  const auto corpus = read_corpus(src, opts);
  const auto plan = pack_bfd_optimized(chunk_corpus(corpus).chunks, 4);

  std::ostringstream out;
  materialize(out, plan, corpus, 9);
  const auto bytes = out.str();
  ASSERT_EQ(bytes.size(), plan.num_sequences() * 4 * 4);
  EXPECT_EQ(bytes.substr(16, 4), std::string("\x00\x00\x01\x00", 4));

  // Chunks: a[0,4) = 1 2 3 4, a[4,5) = 7, b[0,2) = 65536 7.
  EXPECT_EQ(decode(bytes),
            (std::vector<std::uint32_t>{1, 2, 3, 4, 65536, 7, 7, 9}));
}

TEST(Materialize, Errors) {
  const auto corpus = Corpus::from_lengths(kFiveDocs, 8);
  const auto plan = pack_concat(corpus);
  std::ostringstream out;
  EXPECT_THROW(materialize(out, plan, corpus), Error);
}

}  // namespace
}  // namespace bfpack

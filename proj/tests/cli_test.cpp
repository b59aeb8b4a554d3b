#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace bfpack {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("bfpack_cli_" + std::string(info->name()) + "_" +
            std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

constexpr const char* kFiveDocs =
    "{\"id\":\"blue\",\"length\":14}\n"
    "{\"id\":\"red\",\"length\":7}\n"
    "{\"id\":\"green\",\"length\":5}\n"
    "{\"id\":\"yellow\",\"length\":2}\n"
    "{\"id\":\"purple\",\"length\":3}\n";

TEST_F(CliTest, PackWritesPlanAndReports) {
  const auto corpus = write("c.jsonl", kFiveDocs);
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"pack", corpus.string(), "-L", "8", "--out", out.string()}), 0)
      << err_.str();
  for (const auto* name : {"plan.jsonl", "report.json", "report.txt", "truncation.csv"}) {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["compactness"]["num_sequences"], 4);
  EXPECT_EQ(report["compactness"]["num_padding_tokens"], 1);
  EXPECT_EQ(report["compactness"]["delta_vs_concat"], 0);
  EXPECT_EQ(report["truncation"]["total_truncations"], 1);
  EXPECT_EQ(slurp(out / "truncation.csv"),
            "length,doc_count,truncations\n2,1,0\n3,1,0\n5,1,0\n7,1,0\n14,1,1\n");
  EXPECT_NE(out_.str().find("4 sequences"), std::string::npos);
  for (const auto& entry : fs::directory_iterator(out)) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }
}

TEST_F(CliTest, ConcatBaseline) {
  const auto corpus = write("c.jsonl", kFiveDocs);
  const auto out = dir_ / "concat";
  ASSERT_EQ(run({"concat", corpus.string(), "-L", "8", "-o", out.string()}), 0);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["compactness"]["num_sequences"], 4);
  EXPECT_EQ(report["truncation"]["truncated_documents"], 3);
  EXPECT_FALSE(report["compactness"].contains("delta_vs_concat"));

  ASSERT_EQ(run({"pack", corpus.string(), "-L", "8", "--method", "concat",
                 "--drop-remainder", "-o", (dir_ / "drop").string()}),
            0);
  const auto dropped = nlohmann::json::parse(slurp(dir_ / "drop" / "report.json"));
  EXPECT_EQ(dropped["compactness"]["num_sequences"], 3);
}

TEST_F(CliTest, StatsReproducesPackReports) {
  const auto corpus = write("c.jsonl", kFiveDocs);
  for (const std::string method : {"bfd", "ffd", "concat"}) {
    const auto a = dir_ / ("pack_" + method);
    const auto b = dir_ / ("stats_" + method);
    ASSERT_EQ(run({"pack", corpus.string(), "-L", "8", "--sentinel", "--method", method,
                   "-o", a.string()}),
              0);
    ASSERT_EQ(run({"stats", corpus.string(), "-L", "8", "--sentinel", "--method", method,
                   "--plan", (a / "plan.jsonl").string(), "-o", b.string()}),
              0)
        << err_.str();
    for (const auto* name : {"report.json", "report.txt", "truncation.csv"}) {
      EXPECT_EQ(slurp(a / name), slurp(b / name)) << method << " " << name;
    }
  }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  std::string text;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    text += "{\"id\":\"x" + std::to_string(i) + "\",\"length\":" +
            std::to_string(1 + rng() % 300) + "}\n";
  }
  const auto corpus = write("c.jsonl", text);
  ASSERT_EQ(run({"pack", corpus.string(), "-L", "64", "-o", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run({"pack", corpus.string(), "-L", "64", "-o", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "plan.jsonl"), slurp(dir_ / "b" / "plan.jsonl"));
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
}

TEST_F(CliTest, ExitCodes) {
  const auto good = write("good.jsonl", kFiveDocs);
  EXPECT_EQ(run({"pack", good.string(), "-L", "0", "-o", (dir_ / "o").string()}), 2);
  EXPECT_EQ(run({"pack", good.string(), "--method", "magic", "-o", (dir_ / "o").string()}), 2);
  EXPECT_EQ(run({"pack", good.string()}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"pack", good.string(), "-L", "1", "--sentinel", "-o",
                 (dir_ / "o").string()}),
            2);

  const auto bad = write("bad.jsonl", "{\"id\":\"a\",\"length\":3}\n{nope\n");
  EXPECT_EQ(run({"pack", bad.string(), "-o", (dir_ / "o").string()}), 3);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);

  const auto huge = write("huge.jsonl", "{\"id\":\"a\",\"length\":99999999999}\n");
  EXPECT_EQ(run({"pack", huge.string(), "-o", (dir_ / "o").string()}), 4);

  EXPECT_FALSE(fs::exists(dir_ / "o"));
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, BadPlanLeavesNoOutputs) {
  const auto corpus = write("c.jsonl", kFiveDocs);
  const auto plan = write("plan.jsonl",
                          "{\"seq\":0,\"items\":[{\"doc\":\"red\",\"start\":0,\"end\":7}],"
                          "\"pad\":0}\n");
  const auto out = dir_ / "stats";
  EXPECT_EQ(run({"stats", corpus.string(), "-L", "8", "--plan", plan.string(), "-o",
                 out.string()}),
            4);
  EXPECT_FALSE(fs::exists(out / "report.json"));

  // A plan that parses but misses documents is rejected before anything is
  // written.
  const auto partial = write("partial.jsonl",
                             "{\"seq\":0,\"items\":[{\"doc\":\"red\",\"start\":0,\"end\":7}],"
                             "\"pad\":1}\n");
  EXPECT_NE(run({"stats", corpus.string(), "-L", "8", "--plan", partial.string(), "-o",
                 out.string()}),
            0);
  EXPECT_FALSE(fs::exists(out / "report.json"));
}

TEST_F(CliTest, MaterializeEndToEnd) {
  const auto corpus = write("t.jsonl",
                            "{\"id\":\"a\",\"tokens\":[1,2,3,4,5]}\n"
                            "{\"id\":\"b\",\"tokens\":[6,7]}\n");
  const auto out = dir_ / "p";
  ASSERT_EQ(run({"pack", corpus.string(), "-L", "4", "--mode", "token-ids", "-o",
                 out.string()}),
            0);
  const auto bin = dir_ / "rows.bin";
  ASSERT_EQ(run({"materialize", corpus.string(), "-L", "4", "--plan",
                 (out / "plan.jsonl").string(), "--pad-id", "255", "-o", bin.string()}),
            0)
      << err_.str();
  const auto bytes = slurp(bin);
  ASSERT_EQ(bytes.size(), 2u * 4u * 4u);
  // Rows: [1 2 3 4] and [5 6 7 pad] in some order; check the multiset.
  std::multiset<unsigned> values;
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    EXPECT_EQ(bytes[i + 1], 0);
    EXPECT_EQ(bytes[i + 2], 0);
    EXPECT_EQ(bytes[i + 3], 0);
    values.insert(static_cast<unsigned char>(bytes[i]));
  }
  EXPECT_EQ(values, (std::multiset<unsigned>{1, 2, 3, 4, 5, 6, 7, 255}));
}

TEST_F(CliTest, ToyCsv) {
  ASSERT_EQ(run({"toy", "--p-grid", "0.5,0.75", "--m-max", "1"}), 0);
  EXPECT_EQ(out_.str(),
            "p,m,loss_a,loss_b,relative_increase\n"
            "0.5,1,0.6931471805599453,0.6931471805599453,0\n"
            "0.75,1,0.5623351446188083,0.5977100351872332,0.06290713092884241\n");
  const auto file = dir_ / "toy.csv";
  ASSERT_EQ(run({"toy", "--p-grid", "0.6", "--m-max", "3", "-o", file.string()}), 0);
  const auto csv = slurp(file);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(run({"toy", "--p-grid", "0.3"}), 2);
}

TEST_F(CliTest, BenchWritesJson) {
  const auto file = dir_ / "bench.json";
  ASSERT_EQ(run({"bench", "--sizes", "10,100", "-L", "64", "--reps", "1", "-o",
                 file.string()}),
            0);
  const auto j = nlohmann::json::parse(slurp(file));
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(run({"bench", "--sizes", "100,10"}), 2);
}

}  // namespace
}  // namespace bfpack

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "outlier/detect.hpp"
#include "outlier/text.hpp"
#include "test_support.hpp"

using outlier::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(OUTLIER_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, DetectMetricsSplitOnSyntheticCorpus) {
  TempDir dir("outlier-cli");
  const auto corpus = dir.path() / "corpus.jsonl", vectors = dir.path() / "vectors.txt";
  ASSERT_EQ(run("synth --corpus " + corpus.string() + " --vectors " + vectors.string() +
                " --classes 3 --per-class 30"),
            0);
  ASSERT_EQ(run("detect --corpus " + corpus.string() + " --vectors " + vectors.string() +
                " --method average --k 10 --out " + (dir.path() / "ranked").string()),
            0);
  std::ifstream in(dir.path() / "ranked" / "class_00.jsonl");
  auto lists = outlier::read_ranked_lists(in);
  ASSERT_EQ(lists.size(), 1u);
  EXPECT_EQ(lists.begin()->second.size(), 30u);

  EXPECT_EQ(run("metrics --corpus " + corpus.string()), 0);
  const auto train = dir.path() / "train.jsonl", test = dir.path() / "test.jsonl";
  ASSERT_EQ(run("split --corpus " + corpus.string() + " --train " + train.string() + " --test " + test.string()), 0);
  EXPECT_EQ(outlier::load_corpus(train).size() + outlier::load_corpus(test).size(), 90u);
  EXPECT_EQ(run("metrics --corpus " + train.string() + " --test " + test.string()), 0);
}

TEST(Cli, ErrorsGiveNonZeroExit) {
  EXPECT_NE(run("detect --bogus"), 0);
  EXPECT_NE(run("detect --corpus /does/not/exist --out x"), 0);
  EXPECT_NE(run(""), 0);
  TempDir dir("outlier-cli-err");
  const auto corpus = dir.path() / "c.jsonl";
  std::ofstream(corpus) << R"({"id":"a","text":"hi","label":"x"})" << '\n';
  EXPECT_NE(run("detect --corpus " + corpus.string() + " --method average --out " + dir.path().string()), 0);
  EXPECT_NE(run("bench --methods nonsense"), 0);
}

TEST(Cli, BenchWritesTableAndCurves) {
  TempDir dir("outlier-cli-bench");
  ASSERT_EQ(run("bench --p 0.04 --methods random,bow,average --out " + dir.path().string()), 0);
  const auto table = slurp(dir.path() / "table.tsv");
  EXPECT_EQ(table.rfind("method\tMAP\trecall@10", 0), 0u);
  EXPECT_TRUE(fs::exists(dir.path() / "curves" / "average.tsv"));
  EXPECT_TRUE(fs::exists(dir.path() / "recall.svg"));
}

TEST(Cli, InitNeedsAStore) {
  TempDir dir("outlier-cli-init");
  const std::string unset = "env -u OUTLIER_STORE ";
  const int rc = std::system((unset + OUTLIER_CLI + " init --generator > /dev/null 2>&1").c_str());
  EXPECT_NE(WEXITSTATUS(rc), 0);
  EXPECT_EQ(run("init --generator --store " + (dir.path() / "p").string()), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "p" / "project.json"));
}

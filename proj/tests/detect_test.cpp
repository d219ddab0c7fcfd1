#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "outlier/detect.hpp"
#include "outlier/error.hpp"

using namespace outlier;

namespace {

EmbeddingMatrix matrix_of(std::initializer_list<std::pair<const char*, Vector>> rows) {
  EmbeddingMatrix m(rows.begin()->second.size());
  for (const auto& [id, v] : rows) m.append(id, v);
  return m;
}

RankedList list_of(std::vector<std::string> ids) {
  RankedList l;
  l.class_key = "c";
  l.method = "m";
  for (std::size_t i = 0; i < ids.size(); ++i) l.entries.push_back({ids[i], double(ids.size() - i), i + 1});
  return l;
}

}  // namespace

TEST(ClassMean, Arithmetic) {
  EXPECT_EQ(class_mean(matrix_of({{"a", {0, 0}}, {"b", {2, 2}}})), (Vector{1, 1}));
  EXPECT_EQ(class_mean(matrix_of({{"a", {3, -1}}})), (Vector{3, -1}));
  EXPECT_EQ(class_mean(matrix_of({{"a", {1, -2}}, {"b", {-1, 2}}})), (Vector{0, 0}));
  EXPECT_THROW(class_mean(EmbeddingMatrix(2)), Error);
}

TEST(RankByDistance, FarthestFirst) {
  auto l = rank_by_distance(matrix_of({{"a", {0}}, {"b", {0}}, {"c", {3}}}), "k");
  EXPECT_EQ(l.ids(), (std::vector<std::string>{"c", "a", "b"}));
  EXPECT_DOUBLE_EQ(l.entries[0].score, 2.0);
  EXPECT_DOUBLE_EQ(l.entries[1].score, 1.0);
  EXPECT_EQ(l.entries[0].rank, 1u);
  EXPECT_EQ(l.entries[2].rank, 3u);
  EXPECT_EQ(l.class_key, "k");
}

TEST(RankByDistance, SingleRowAndTies) {
  auto one = rank_by_distance(matrix_of({{"x", {5, 5}}}), "k");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.entries[0].score, 0.0);
  auto tie = rank_by_distance(matrix_of({{"z", {1}}, {"y", {-1}}}), "k");
  EXPECT_EQ(tie.ids(), (std::vector<std::string>{"y", "z"}));
}

TEST(RankBaseline, ShortLongRandom) {
  std::vector<Utterance> us{make_utterance("a", "one two", "c"), make_utterance("b", "one two three four five", "c"),
                            make_utterance("d", "one two three", "c")};
  EXPECT_EQ(rank_baseline(us, Method::Short, 0).ids(), (std::vector<std::string>{"a", "d", "b"}));
  EXPECT_EQ(rank_baseline(us, Method::Long, 0).ids(), (std::vector<std::string>{"b", "d", "a"}));
  EXPECT_EQ(rank_baseline(us, Method::Random, 42), rank_baseline(us, Method::Random, 42));
  auto r = rank_baseline(us, Method::Random, 42).ids();
  std::sort(r.begin(), r.end());
  EXPECT_EQ(r, (std::vector<std::string>{"a", "b", "d"}));
}

TEST(Borda, MergesByPoints) {
  std::vector<RankedList> lists{list_of({"a", "b", "c"}), list_of({"c", "a", "b"})};
  auto m = borda_merge(lists);
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"a", "c", "b"}));
  EXPECT_EQ(m.entries[0].score, 3.0);
  EXPECT_EQ(m.entries[1].score, 2.0);
  EXPECT_EQ(m.entries[2].score, 1.0);
}

TEST(Borda, IdentityCases) {
  auto l = list_of({"q", "a", "m", "z"});
  std::vector<RankedList> one{l};
  EXPECT_EQ(borda_merge(one).ids(), l.ids());
  std::vector<RankedList> three{l, l, l};
  EXPECT_EQ(borda_merge(three).ids(), l.ids());
  std::vector<RankedList> bad{l, list_of({"q", "a", "m", "y"})};
  EXPECT_THROW(borda_merge(bad), Error);
}

TEST(Cutoff, CeilRule) {
  EXPECT_EQ(cutoff_count(10, 10), 1u);
  EXPECT_EQ(cutoff_count(10, 25), 3u);
  EXPECT_EQ(cutoff_count(10, 0), 0u);
  EXPECT_EQ(cutoff_count(75, 10), 8u);
  EXPECT_EQ(cutoff_count(100, 10), 10u);
  EXPECT_EQ(cutoff_count(7, 15), 2u);
  EXPECT_EQ(cutoff_count(7, 100), 7u);
}

TEST(FlagTopK, PrefixAndMonotone) {
  auto l = list_of({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  EXPECT_EQ(flag_top_k(l, 10), (std::vector<std::string>{"a"}));
  EXPECT_TRUE(flag_top_k(l, 0).empty());
  std::size_t prev = 0;
  for (int k = 0; k <= 100; ++k) {
    auto f = flag_top_k(l, k);
    EXPECT_GE(f.size(), prev);
    prev = f.size();
  }
  EXPECT_EQ(prev, 10u);
}

TEST(RankerSpec, ParseAndName) {
  auto s = RankerSpec::parse("borda:average+sif");
  EXPECT_EQ(s.methods, (std::vector<Method>{Method::Average, Method::Sif}));
  EXPECT_EQ(s.name(), "borda:average+sif");
  EXPECT_TRUE(s.needs_word_vectors());
  EXPECT_EQ(RankerSpec::parse("bow").name(), "bow");
  EXPECT_FALSE(RankerSpec::parse("bow").needs_word_vectors());
  EXPECT_THROW(RankerSpec::parse("nope"), Error);
}

namespace {

struct Fixture {
  WordVectorTable words{2};
  LabeledCorpus corpus;
  Fixture() {
    words.insert("up", {0, 1});
    words.insert("down", {0, -1});
    words.insert("left", {-1, 0});
    words.insert("right", {1, 0});
    corpus.add(make_utterance("a1", "up up", "a"));
    corpus.add(make_utterance("a2", "up left", "a"));
    corpus.add(make_utterance("a3", "down down", "a"));
    corpus.add(make_utterance("b1", "right", "b"));
    corpus.add(make_utterance("b2", "right up", "b"));
  }
};

}  // namespace

TEST(DetectAllClasses, PartitionsCorpus) {
  Fixture f;
  EmbeddingContext ctx;
  ctx.words = &f.words;
  auto lists = detect_all_classes(f.corpus, ctx, {});
  ASSERT_EQ(lists.size(), 2u);
  EXPECT_EQ(lists.at("a").size(), 3u);
  EXPECT_EQ(lists.at("b").size(), 2u);
  EXPECT_EQ(lists.at("a").entries[0].id, "a3");
}

TEST(DetectAllClasses, OrderInvariant) {
  Fixture f;
  LabeledCorpus shuffled;
  for (const char* id : {"b2", "a3", "b1", "a1", "a2"}) shuffled.add(*f.corpus.find(id));
  EmbeddingContext ctx;
  ctx.words = &f.words;
  DetectionConfig cfg;
  cfg.ranker = RankerSpec::parse("borda:average+bow");
  EXPECT_EQ(detect_all_classes(f.corpus, ctx, cfg), detect_all_classes(shuffled, ctx, cfg));
}

TEST(DetectAllClasses, MissingVectorsIsAnError) {
  Fixture f;
  EXPECT_THROW(detect_all_classes(f.corpus, {}, {}), Error);
}

TEST(RankedListIo, RoundTrip) {
  Fixture f;
  EmbeddingContext ctx;
  ctx.words = &f.words;
  auto lists = detect_all_classes(f.corpus, ctx, {});
  std::stringstream ss;
  for (const auto& [k, l] : lists) write_ranked_list(ss, l);
  EXPECT_EQ(read_ranked_lists(ss), lists);
}

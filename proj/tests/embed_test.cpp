#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "outlier/embed.hpp"
#include "outlier/error.hpp"

using namespace outlier;

namespace {

WordVectorTable table_of(std::initializer_list<std::pair<const char*, Vector>> entries) {
  WordVectorTable t(entries.begin()->second.size());
  for (const auto& [w, v] : entries) t.insert(w, v);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(WordVectors, ReadsTable) {
  std::istringstream in("cat 0.1 0.2 0.3\ndog 1 2 3\n");
  auto t = read_word_vectors(in);
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ((*t.find("dog"))[2], 3.0);
  EXPECT_EQ(t.find("cow"), nullptr);
}

TEST(WordVectors, DimensionMismatchIsAnError) {
  std::istringstream in("cat 1 2 3 4\ndog 1 2 3\n");
  try {
    read_word_vectors(in, {}, "v.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad("cat 1 x 3\n");
  EXPECT_THROW(read_word_vectors(bad), ParseError);
}

TEST(WordVectors, DuplicateKeepsFirst) {
  std::istringstream in("cat 1 1\ncat 2 2\n");
  auto t = read_word_vectors(in);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.duplicates_skipped(), 1u);
  EXPECT_EQ((*t.find("cat"))[0], 1.0);
}

TEST(WordVectors, WriteReadRoundTrip) {
  auto t = table_of({{"a", {0.1, -2.5}}, {"b", {1e-7, 3.0}}});
  std::stringstream ss;
  std::vector<std::string> order{"a", "b"};
  write_word_vectors(ss, t, order);
  auto back = read_word_vectors(ss);
  EXPECT_EQ(*back.find("a"), *t.find("a"));
  EXPECT_EQ(*back.find("b"), *t.find("b"));
}

TEST(Frequencies, CountsTokens) {
  LabeledCorpus c;
  c.add(make_utterance("1", "a b", "x"));
  c.add(make_utterance("2", "a", "y"));
  auto f = count_frequencies(c);
  EXPECT_EQ(f.count("a"), 2u);
  EXPECT_EQ(f.count("b"), 1u);
  EXPECT_EQ(f.total(), 3u);
  EXPECT_DOUBLE_EQ(f.probability("a"), 2.0 / 3.0);
  EXPECT_EQ(f.probability("z"), 0.0);
  EXPECT_THROW(count_frequencies(LabeledCorpus{}), Error);
}

TEST(EmbedAverage, MeanOfKnownVectors) {
  auto t = table_of({{"x", {1, 0}}, {"y", {0, 1}}});
  std::vector<std::string> toks{"x", "y"};
  auto e = embed_average(toks, t);
  EXPECT_EQ(e.vector, (Vector{0.5, 0.5}));
  EXPECT_EQ(e.oov_count, 0u);

  std::vector<std::string> oov{"p", "q", "r"};
  e = embed_average(oov, t);
  EXPECT_EQ(e.vector, (Vector{0, 0}));
  EXPECT_EQ(e.oov_count, 3u);

  std::vector<std::string> one{"y", "zzz"};
  e = embed_average(one, t);
  EXPECT_EQ(e.vector, (Vector{0, 1}));
  EXPECT_EQ(e.oov_count, 1u);
}

TEST(EmbedAverage, StaysInConvexHull) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  WordVectorTable t(4);
  for (int i = 0; i < 10; ++i) t.insert("w" + std::to_string(i), {u(rng), u(rng), u(rng), u(rng)});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> toks;
    for (int k = 0; k < 5; ++k) toks.push_back("w" + std::to_string(rng() % 10));
    auto e = embed_average(toks, t);
    for (std::size_t d = 0; d < 4; ++d) {
      double lo = 1e9, hi = -1e9;
      for (const auto& w : toks) {
        lo = std::min(lo, (*t.find(w))[d]);
        hi = std::max(hi, (*t.find(w))[d]);
      }
      EXPECT_GE(e.vector[d], lo - 1e-12);
      EXPECT_LE(e.vector[d], hi + 1e-12);
    }
  }
}

TEST(SifWeight, FormulaValues) {
  FrequencyTable f;
  EXPECT_EQ(sif_weight("unseen", f, 1e-3), 1.0);
  f.add("a", 1);
  f.add("b", 999);
  EXPECT_DOUBLE_EQ(sif_weight("a", f, 1e-3), 0.5);
  FrequencyTable g;
  g.add("c", 1);
  g.add("d", 9);
  EXPECT_NEAR(sif_weight("c", g, 1e-3), 0.009900990099009901, 1e-15);
}

TEST(SifWeight, DecreasingAndBounded) {
  FrequencyTable f;
  f.add("a", 1);
  f.add("b", 5);
  f.add("c", 50);
  const double wa = sif_weight("a", f, 1e-3), wb = sif_weight("b", f, 1e-3), wc = sif_weight("c", f, 1e-3);
  EXPECT_GT(wa, wb);
  EXPECT_GT(wb, wc);
  EXPECT_GT(wc, 0.0);
  EXPECT_LE(wa, 1.0);
}

TEST(EmbedSif, EqualFrequenciesGiveAverageUnderWeightSum) {
  auto t = table_of({{"x", {1, 0}}, {"y", {0, 1}}});
  FrequencyTable f;
  f.add("x", 3);
  f.add("y", 3);
  std::vector<Utterance> us{make_utterance("u", "x y", "c")};
  SifConfig cfg;
  cfg.remove_common_component = false;
  cfg.normalization = SifNormalization::WeightSum;
  auto m = embed_sif(us, t, f, cfg);
  EXPECT_DOUBLE_EQ(m.row(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(m.row(0)[1], 0.5);

  // Token-count normalization keeps the direction and scales by the common weight.
  cfg.normalization = SifNormalization::TokenCount;
  m = embed_sif(us, t, f, cfg);
  const double w = 1e-3 / (1e-3 + 0.5);
  EXPECT_DOUBLE_EQ(m.row(0)[0], 0.5 * w);
  EXPECT_DOUBLE_EQ(m.row(0)[1], 0.5 * w);
}

TEST(EmbedSif, SingleTokenIsScaledVector) {
  auto t = table_of({{"x", {2, -4}}});
  FrequencyTable f;
  f.add("x", 1);
  f.add("other", 3);
  std::vector<Utterance> us{make_utterance("u", "x", "c")};
  SifConfig cfg;
  cfg.remove_common_component = false;
  auto m = embed_sif(us, t, f, cfg);
  const double w = 1e-3 / (1e-3 + 0.25);
  EXPECT_DOUBLE_EQ(m.row(0)[0], 2 * w);
  EXPECT_DOUBLE_EQ(m.row(0)[1], -4 * w);
}

TEST(EmbedSif, RareTokenOutweighsCommonToken) {
  auto t = table_of({{"rare", {1, 0}}, {"common", {0, 1}}});
  FrequencyTable f;
  f.add("rare", 1);
  f.add("common", 100);
  f.add("filler", 899);
  std::vector<Utterance> us{make_utterance("u", "rare common", "c")};
  SifConfig cfg;
  cfg.remove_common_component = false;
  auto m = embed_sif(us, t, f, cfg);
  EXPECT_NEAR(m.row(0)[0] / m.row(0)[1], 50.5, 1e-9);
}

TEST(EmbedSif, AllOovIsAnError) {
  auto t = table_of({{"x", {1, 0}}});
  FrequencyTable f;
  f.add("q");
  std::vector<Utterance> us{make_utterance("u", "q q", "c")};
  EXPECT_THROW(embed_sif(us, t, f), Error);
}

TEST(CommonComponent, RankOneCollapses) {
  EmbeddingMatrix m(3);
  for (int i = 1; i <= 5; ++i) {
    const double s = i * (i % 2 ? 1.0 : -0.5);
    const double r[] = {s * 1.0, s * 2.0, s * -1.0};
    m.append(std::to_string(i), r);
  }
  auto out = remove_common_component(m);
  for (std::size_t i = 0; i < out.rows(); ++i) EXPECT_LE(std::sqrt(dot(out.row(i), out.row(i))), 1e-8);
}

TEST(CommonComponent, RowsBecomeOrthogonal) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    EmbeddingMatrix m(8);
    for (int i = 0; i < 25; ++i) {
      Vector r(8);
      for (auto& x : r) x = g(rng) + 2.0;
      m.append(std::to_string(i), r);
    }
    auto u = dominant_direction(m, 100, 1e-6);
    ASSERT_TRUE(u.has_value());
    auto out = remove_common_component(m);
    for (std::size_t i = 0; i < out.rows(); ++i) EXPECT_LE(std::abs(dot(out.row(i), *u)), 1e-4);
  }
}

TEST(CommonComponent, ZeroMatrixUnchanged) {
  EmbeddingMatrix m(2);
  const double z[] = {0, 0};
  m.append("a", z);
  m.append("b", z);
  EXPECT_FALSE(dominant_direction(m, 100, 1e-6).has_value());
  auto out = remove_common_component(m);
  EXPECT_EQ(out.row(1)[0], 0.0);
}

TEST(CommonComponent, OrthogonalRowsUnchanged) {
  // Dominant direction is e1; rows along e2 are untouched.
  EmbeddingMatrix m(2);
  const double a[] = {10, 0}, b[] = {0, 1}, c[] = {-10, 0};
  m.append("a", a);
  m.append("b", b);
  m.append("c", c);
  auto out = remove_common_component(m);
  EXPECT_NEAR(out.row(1)[0], 0.0, 1e-6);
  EXPECT_NEAR(out.row(1)[1], 1.0, 1e-9);
}

TEST(Precomputed, ReadsAndSelects) {
  std::istringstream in(R"({"id":"a","vector":[1,2,3,4]})"
                        "\n"
                        R"({"id":"b","vector":[5,6,7,8]})"
                        "\n");
  auto m = read_precomputed(in);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.dim(), 4u);
  std::vector<std::string> ids{"b"};
  auto sel = select_rows(m, ids);
  EXPECT_EQ(sel.matrix.rows(), 1u);
  EXPECT_EQ(sel.matrix.row(0)[0], 5.0);
  EXPECT_EQ(sel.unused_ids, (std::vector<std::string>{"a"}));
  std::vector<std::string> missing{"c"};
  EXPECT_THROW(select_rows(m, missing), Error);
}

TEST(Precomputed, DuplicateIdIsAnError) {
  std::istringstream in(R"({"id":"a","vector":[1]})"
                        "\n"
                        R"({"id":"a","vector":[2]})"
                        "\n");
  EXPECT_THROW(read_precomputed(in), Error);
}

TEST(Bow, RawCounts) {
  std::vector<Utterance> us{make_utterance("1", "a b", "c"), make_utterance("2", "b b", "c"),
                            make_utterance("3", "a b", "c")};
  auto m = embed_bow(us);
  ASSERT_EQ(m.dim(), 2u);
  EXPECT_EQ(m.row(0)[0], 1.0);
  EXPECT_EQ(m.row(0)[1], 1.0);
  EXPECT_EQ(m.row(1)[0], 0.0);
  EXPECT_EQ(m.row(1)[1], 2.0);
  EXPECT_EQ(m.row(2)[0], m.row(0)[0]);
  for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_EQ(m.row(i)[0] + m.row(i)[1], 2.0);
}

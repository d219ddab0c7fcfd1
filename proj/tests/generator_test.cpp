#include <gtest/gtest.h>

#include <set>

#include "outlier/error.hpp"
#include "outlier/generator.hpp"
#include "outlier/synth.hpp"

using namespace outlier;

TEST(GeneratorConfig, DefaultIsValid) {
  auto cfg = default_generator_config();
  EXPECT_EQ(cfg.classes.size(), 10u);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(cfg.grammar("nope"), NotFoundError);
}

TEST(GeneratorConfig, RejectsBadRatesAndEmptyTemplates) {
  auto cfg = default_generator_config();
  cfg.noise_rate = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = default_generator_config();
  cfg.classes[0].templates.clear();
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Generator, DeterministicPerStream) {
  ParaphraseGenerator g(default_generator_config(3));
  auto seeds = g.initial_seeds(3);
  EXPECT_EQ(seeds.size(), 30u);
  const auto& seed = seeds.members("alarm")[0];
  auto a = g.paraphrase(seed, 20, 1), b = g.paraphrase(seed, 20, 1), c = g.paraphrase(seed, 20, 2);
  ASSERT_EQ(a.size(), 20u);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].text == b[i].text && a[i].noise == b[i].noise;
    differs = differs || a[i].text != c[i].text;
  }
  EXPECT_TRUE(same);
  EXPECT_TRUE(differs);
}

TEST(Generator, NoiseRateZeroGivesNoNoise) {
  auto cfg = default_generator_config();
  cfg.noise_rate = 0.0;
  ParaphraseGenerator g(cfg);
  auto seeds = g.initial_seeds(1);
  for (const auto& [key, members] : seeds.classes()) {
    for (const auto& p : g.paraphrase(members[0], 50, 7)) EXPECT_FALSE(p.noise);
  }
}

TEST(Generator, FringeSeedsPullParaphrasesToFringe) {
  auto cfg = default_generator_config();
  cfg.noise_rate = 0.0;
  ParaphraseGenerator g(cfg);
  const auto& gram = cfg.grammar("music");
  const std::set<std::string> fringe(gram.fringe.begin(), gram.fringe.end());
  auto fringe_share = [&](const Utterance& seed) {
    std::size_t hits = 0, total = 0;
    for (const auto& p : g.paraphrase(seed, 400, 1)) {
      for (const auto& t : tokenize(p.text)) {
        total += 1;
        hits += fringe.count(t);
      }
    }
    return double(hits) / double(total);
  };
  auto core_seed = make_utterance("s1", gram.core[0] + " " + gram.core[1], "music");
  auto fringe_seed = make_utterance("s2", gram.fringe[0] + " " + gram.fringe[1], "music");
  EXPECT_GT(fringe_share(fringe_seed), 3 * fringe_share(core_seed));
}

TEST(Generator, WordVectorsCoverVocabulary) {
  ParaphraseGenerator g(default_generator_config());
  auto v = g.word_vectors(16);
  EXPECT_EQ(v.dim(), 16u);
  for (const auto& gram : g.config().classes) {
    for (const auto& w : gram.core) EXPECT_NE(v.find(w), nullptr);
    for (const auto& w : gram.fringe) EXPECT_NE(v.find(w), nullptr);
  }
}

TEST(Synthetic, ShapeAndDeterminism) {
  auto a = make_synthetic_corpus({.classes = 3, .per_class = 20, .dim = 6});
  auto b = make_synthetic_corpus({.classes = 3, .per_class = 20, .dim = 6});
  EXPECT_EQ(a.corpus.size(), 60u);
  EXPECT_EQ(a.corpus.class_keys().size(), 3u);
  EXPECT_EQ(a.corpus, b.corpus);
  for (const auto& [key, members] : a.corpus.classes()) {
    for (const auto& u : members) {
      for (const auto& t : u.tokens) EXPECT_NE(a.vectors.find(t), nullptr);
    }
  }
}

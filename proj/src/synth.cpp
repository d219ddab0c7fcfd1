#include "outlier/synth.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "outlier/error.hpp"

namespace outlier {

namespace {

Vector gaussian_vector(Rng& rng, std::size_t dim, double norm_target) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(dim);
  double n2 = 0.0;
  for (double& x : v) {
    x = g(rng);
    n2 += x * x;
  }
  const double scale = norm_target / std::sqrt(n2);
  for (double& x : v) x *= scale;
  return v;
}

std::string unique_word(Rng& rng, std::set<std::string>& used) {
  std::uniform_int_distribution<std::size_t> syllables(2, 3);
  for (;;) {
    std::string w = pseudo_word(rng, syllables(rng));
    if (used.insert(w).second) return w;
  }
}

std::discrete_distribution<std::size_t> zipf(std::size_t n) {
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  return {weights.begin(), weights.end()};
}

}  // namespace

std::string pseudo_word(Rng& rng, std::size_t syllables) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1);
  std::uniform_int_distribution<std::size_t> v(0, vowels.size() - 1);
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w.push_back(consonants[c(rng)]);
    w.push_back(vowels[v(rng)]);
  }
  return w;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusConfig& cfg) {
  if (cfg.classes < 2 || cfg.per_class == 0 || cfg.dim == 0 || cfg.class_vocabulary == 0 ||
      cfg.min_length == 0 || cfg.min_length > cfg.max_length) {
    throw Error("invalid synthetic corpus configuration");
  }
  Rng rng(cfg.seed);
  SyntheticCorpus out;
  out.vectors = WordVectorTable(cfg.dim, "synthetic");
  std::set<std::string> used;

  std::vector<std::string> shared;
  for (std::size_t i = 0; i < cfg.shared_vocabulary; ++i) {
    shared.push_back(unique_word(rng, used));
    out.vectors.insert(shared.back(), gaussian_vector(rng, cfg.dim, cfg.shared_spread));
    out.vocabulary.push_back(shared.back());
  }

  std::vector<std::vector<std::string>> class_words(cfg.classes);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    Vector centroid = gaussian_vector(rng, cfg.dim, 1.0);
    for (std::size_t i = 0; i < cfg.class_vocabulary; ++i) {
      std::string w = unique_word(rng, used);
      Vector v = gaussian_vector(rng, cfg.dim, cfg.word_spread);
      for (std::size_t j = 0; j < cfg.dim; ++j) v[j] += centroid[j];
      out.vectors.insert(w, std::move(v));
      out.vocabulary.push_back(w);
      class_words[c].push_back(std::move(w));
    }
  }

  auto class_pick = zipf(cfg.class_vocabulary);
  auto shared_pick = zipf(std::max<std::size_t>(1, cfg.shared_vocabulary));
  std::uniform_int_distribution<std::size_t> length(cfg.min_length, cfg.max_length);
  std::bernoulli_distribution is_shared(cfg.shared_vocabulary == 0 ? 0.0 : cfg.shared_rate);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    char key[32];
    std::snprintf(key, sizeof key, "class_%02zu", c);
    for (std::size_t i = 0; i < cfg.per_class; ++i) {
      std::string text;
      const std::size_t len = length(rng);
      for (std::size_t t = 0; t < len; ++t) {
        if (!text.empty()) text.push_back(' ');
        text += is_shared(rng) ? shared[shared_pick(rng)] : class_words[c][class_pick(rng)];
      }
      char id[48];
      std::snprintf(id, sizeof id, "%s-%03zu", key, i);
      out.corpus.add(make_utterance(id, std::move(text), key));
    }
  }
  return out;
}

}  // namespace outlier

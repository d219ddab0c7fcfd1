#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "outlier/embed.hpp"
#include "outlier/text.hpp"

namespace outlier {

/// Templates are space-separated words where "_" marks a slot filled from
/// the class vocabulary.
struct ClassGrammar {
  std::string class_key;
  std::vector<std::string> templates;
  std::vector<std::string> core;    // typical phrasing
  std::vector<std::string> fringe;  // rare phrasing; outlying in vector space
};

/// Deterministic stand-in for paraphrasing crowd workers.
///
/// A paraphrase either keeps the seed's word order and swaps some of its
/// vocabulary, or fills a fresh template. Slots copy a seed word with
/// probability `seed_reuse`; otherwise they draw from the class pools, taking
/// a fringe word with probability
///   base_fringe_rate + fringe_adoption * (fringe share of the seed's class words).
/// Seeds carrying fringe words therefore pull later paraphrases toward the
/// fringe. With probability `noise_rate` the output is instead a paraphrase
/// from another class or a garbled string; both count as errors.
struct GeneratorConfig {
  std::vector<ClassGrammar> classes;
  double fringe_adoption = 0.8;
  double base_fringe_rate = 0.04;
  double seed_reuse = 0.5;
  double noise_rate = 0.05;
  std::uint64_t seed = 11;

  void validate() const;
  const ClassGrammar& grammar(const std::string& class_key) const;
};

/// Ten invented intent classes sharing a small pool of template skeletons.
GeneratorConfig default_generator_config(std::uint64_t seed = 11);

struct GeneratedParaphrase {
  std::string text;
  bool noise = false;
};

class ParaphraseGenerator {
 public:
  explicit ParaphraseGenerator(GeneratorConfig cfg);

  const GeneratorConfig& config() const { return cfg_; }

  /// `count` paraphrases of `seed` (class taken from seed.class_key). The
  /// output is a pure function of the config, the seed text and `stream`.
  std::vector<GeneratedParaphrase> paraphrase(const Utterance& seed, std::size_t count,
                                              std::uint64_t stream) const;

  /// Core-vocabulary seeds, `per_class` per class, ids "seed-<class>-<i>".
  LabeledCorpus initial_seeds(std::size_t per_class) const;

  /// Class-clustered vectors for every generator word. Core words sit near
  /// their class centroid, fringe words further out; template words are
  /// short vectors shared by all classes. Garbled noise stays out of vocabulary.
  WordVectorTable word_vectors(std::size_t dim = 32) const;

 private:
  GeneratorConfig cfg_;
};

}  // namespace outlier

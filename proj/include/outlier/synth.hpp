#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "outlier/embed.hpp"
#include "outlier/rng.hpp"
#include "outlier/text.hpp"

namespace outlier {

/// Labeled toy corpus whose word vectors cluster by class. Each class has its
/// own vocabulary drawn Zipf-style; a shared pool of function words appears in
/// every class.
struct SyntheticCorpusConfig {
  std::size_t classes = 10;
  std::size_t per_class = 100;
  std::size_t dim = 50;
  std::size_t class_vocabulary = 60;
  std::size_t shared_vocabulary = 20;
  double shared_rate = 0.3;     // probability a token is a function word
  std::size_t min_length = 3;
  std::size_t max_length = 14;
  double word_spread = 0.5;     // norm of a class word's offset from its class centroid
  double shared_spread = 0.6;   // norm of a function word vector
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  LabeledCorpus corpus;
  WordVectorTable vectors{1};
  std::vector<std::string> vocabulary;  // every word with a vector, in creation order
};

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusConfig& cfg = {});

/// Pronounceable pseudo-word with the given number of syllables.
std::string pseudo_word(Rng& rng, std::size_t syllables);

}  // namespace outlier

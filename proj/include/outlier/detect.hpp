#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "outlier/embed.hpp"
#include "outlier/text.hpp"

namespace outlier {

enum class Method { Average, Sif, Precomputed, Bow, Random, Short, Long };

std::string_view method_name(Method m);
/// Throws Error on an unknown name.
Method parse_method(std::string_view name);

/// One ranker, or a Borda combination of several.
struct RankerSpec {
  std::vector<Method> methods;

  /// "average", or "borda:average+sif" for combinations.
  std::string name() const;
  static RankerSpec parse(std::string_view text);
  bool needs_word_vectors() const;
  bool needs_precomputed() const;
};

struct RankedEntry {
  std::string id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Most-outlying entry first.
struct RankedList {
  std::string class_key;
  std::string method;
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> ids() const;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

struct DetectionConfig {
  RankerSpec ranker{{Method::Average}};
  double k_percent = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Inputs the embedding-based rankers draw on. Unused members may stay null.
struct EmbeddingContext {
  const WordVectorTable* words = nullptr;
  /// SIF frequencies; computed from the whole corpus when null.
  const FrequencyTable* frequencies = nullptr;
  const EmbeddingMatrix* precomputed = nullptr;
  SifConfig sif;
};

/// Arithmetic mean of the rows. Throws Error on an empty matrix.
Vector class_mean(const EmbeddingMatrix& m);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Scores every row by its Euclidean distance to the row mean and sorts
/// most-distant first, ties by id ascending.
RankedList rank_by_distance(const EmbeddingMatrix& m, std::string class_key,
                            std::string method = "distance");

/// Random (seeded shuffle), Short (ascending token count) or Long (descending).
RankedList rank_baseline(std::span<const Utterance> utterances, Method method, std::uint64_t seed,
                         std::string class_key = {});

/// Borda count: position i (1-based) in a list of N earns N - i points.
/// Throws Error if the lists do not rank the same ids.
RankedList borda_merge(std::span<const RankedList> lists);

/// ceil(n * k / 100), clamped to n.
std::size_t cutoff_count(std::size_t n, double k_percent);

/// Ids of the first cutoff_count(n, k) entries, in rank order.
std::vector<std::string> flag_top_k(const RankedList& list, double k_percent);

/// Ranks one class's utterances with a single method.
RankedList rank_class(std::span<const Utterance> utterances, const std::string& class_key,
                      Method method, const EmbeddingContext& ctx, std::uint64_t seed);

/// Ranks one class with a single method or a Borda combination.
RankedList rank_class(std::span<const Utterance> utterances, const std::string& class_key,
                      const RankerSpec& ranker, const EmbeddingContext& ctx, std::uint64_t seed);

/// One list per class, each computed on that class's rows only.
std::map<std::string, RankedList> detect_all_classes(const LabeledCorpus& corpus,
                                                     const EmbeddingContext& ctx,
                                                     const DetectionConfig& cfg);

// Ranked-list export: one JSON object per entry with class_key, rank, id,
// score and method.
void write_ranked_list(std::ostream& out, const RankedList& list);
std::map<std::string, RankedList> read_ranked_lists(std::istream& in,
                                                    const std::string& source_name = "<stream>");

}  // namespace outlier

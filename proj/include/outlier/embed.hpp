#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "outlier/text.hpp"

namespace outlier {

using Vector = std::vector<double>;

/// Word -> vector map with a fixed dimensionality.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim, std::string source = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const std::string& source() const { return source_; }

  /// Returns false (and keeps the existing entry) when the word is already present.
  /// Throws Error when the vector length differs from dim().
  bool insert(std::string word, Vector v);
  /// nullptr for out-of-vocabulary words.
  const Vector* find(std::string_view word) const;

  /// Words rejected by insert() because they were already present.
  std::size_t duplicates_skipped() const { return duplicates_; }

 private:
  std::size_t dim_;
  std::string source_;
  std::unordered_map<std::string, Vector> vectors_;
  std::size_t duplicates_ = 0;
};

/// Reads "word v1 ... vd" lines. The dimension comes from the first line
/// unless expected_dim is given. Duplicate words keep their first vector.
WordVectorTable read_word_vectors(std::istream& in, std::optional<std::size_t> expected_dim = {},
                                  const std::string& source_name = "<stream>");
WordVectorTable load_word_vectors(const std::filesystem::path& path,
                                  std::optional<std::size_t> expected_dim = {});
void write_word_vectors(std::ostream& out, const WordVectorTable& table,
                        std::span<const std::string> order);

class FrequencyTable {
 public:
  void add(std::string_view token, std::size_t count = 1);

  std::size_t count(std::string_view token) const;
  std::size_t total() const { return total_; }
  std::size_t vocabulary_size() const { return counts_.size(); }
  /// count / total; 0 for unseen tokens or an empty table.
  double probability(std::string_view token) const;

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Token counts over every utterance of every class. Throws on an empty corpus.
FrequencyTable count_frequencies(const LabeledCorpus& corpus);

enum class SifNormalization {
  TokenCount,  // divide the weighted sum by the number of in-vocabulary tokens
  WeightSum,   // divide by the sum of the weights (a proper weighted mean)
};

struct SifConfig {
  double a = 1e-3;
  SifNormalization normalization = SifNormalization::TokenCount;
  bool remove_common_component = true;
  int power_iterations = 100;
  double power_tolerance = 1e-6;

  void validate() const;
};

/// Row-major matrix of sentence vectors keyed by utterance id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {}

  /// Throws Error on a length mismatch or a duplicate id.
  void append(std::string id, std::span<const double> row);

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AverageEmbedding {
  Vector vector;
  std::size_t oov_count = 0;
};

/// Mean of the in-vocabulary token vectors. All-OOV input yields the zero vector.
AverageEmbedding embed_average(std::span<const std::string> tokens, const WordVectorTable& table);

EmbeddingMatrix embed_average(std::span<const Utterance> utterances, const WordVectorTable& table);

/// a / (a + p(token)).
double sif_weight(std::string_view token, const FrequencyTable& freq, double a);

/// Frequency-weighted average of in-vocabulary vectors, optionally followed by
/// common-component removal. Fully out-of-vocabulary rows are zero.
/// Throws Error if every utterance is fully out of vocabulary.
EmbeddingMatrix embed_sif(std::span<const Utterance> utterances, const WordVectorTable& table,
                          const FrequencyTable& freq, const SifConfig& cfg = {});

/// Dominant right singular direction of the rows, by power iteration on
/// X^T X from the normalized all-ones vector (falling back to basis vectors
/// when that start is orthogonal to the row space). Empty for a zero matrix.
std::optional<Vector> dominant_direction(const EmbeddingMatrix& m, int iterations, double tolerance);

/// Returns rows r - (r.u)u for the dominant direction u. A zero matrix is
/// returned unchanged.
EmbeddingMatrix remove_common_component(const EmbeddingMatrix& m, int iterations = 100,
                                        double tolerance = 1e-6);

/// Precomputed sentence vectors: one JSON object per line with `id` and `vector`.
EmbeddingMatrix read_precomputed(std::istream& in, const std::string& source_name = "<stream>");
EmbeddingMatrix load_precomputed(const std::filesystem::path& path);

struct RowSelection {
  EmbeddingMatrix matrix;
  /// Ids present in the source but not requested.
  std::vector<std::string> unused_ids;
};

/// Picks rows for the given ids in order. Throws Error if an id is missing.
RowSelection select_rows(const EmbeddingMatrix& source, std::span<const std::string> ids);

/// Raw token counts over the sorted union vocabulary of the given utterances.
EmbeddingMatrix embed_bow(std::span<const Utterance> utterances);

}  // namespace outlier

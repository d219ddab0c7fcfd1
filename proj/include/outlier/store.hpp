#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "outlier/embed.hpp"
#include "outlier/generator.hpp"
#include "outlier/pipeline.hpp"
#include "outlier/text.hpp"

namespace outlier {

/// Synthetic paraphrase source and its word vectors.
struct GeneratorSpec {
  std::uint64_t seed = 11;
  std::size_t dim = 32;
};

struct ProjectConfig {
  PipelineConfig pipeline;
  std::optional<GeneratorSpec> generator;
  bool has_word_vectors = false;  // vectors.txt is part of the store
  double split_ratio = 0.85;
};

nlohmann::json to_json(const ProjectConfig& cfg);
ProjectConfig project_config_from_json(const nlohmann::json& j);

/// Directory layout:
///   project.json   configuration
///   seeds.jsonl    first-round seeds (corpus line format)
///   vectors.txt    word vectors, when supplied
///   events.jsonl   append-only round log
class ProjectStore {
 public:
  /// Creates a new store. Without seeds, the generator's initial seeds are
  /// used. Throws Error if the directory already holds a project.
  static ProjectStore create(const std::filesystem::path& root, const ProjectConfig& cfg,
                             const std::optional<LabeledCorpus>& seeds,
                             const std::optional<std::filesystem::path>& word_vectors = {});
  static ProjectStore open(const std::filesystem::path& root);

  /// Value of OUTLIER_STORE, if set.
  static std::optional<std::filesystem::path> root_from_env();

  const std::filesystem::path& root() const { return root_; }
  const ProjectConfig& config() const { return cfg_; }
  std::filesystem::path events_path() const { return root_ / "events.jsonl"; }

  LabeledCorpus seeds() const;
  /// Word vectors from the store file or the generator; empty when neither exists.
  std::optional<WordVectorTable> word_vectors() const;
  std::optional<ParaphraseGenerator> generator() const;

 private:
  ProjectStore(std::filesystem::path root, ProjectConfig cfg) : root_(std::move(root)), cfg_(std::move(cfg)) {}

  std::filesystem::path root_;
  ProjectConfig cfg_;
};

}  // namespace outlier

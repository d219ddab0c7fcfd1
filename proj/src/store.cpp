#include "outlier/store.hpp"

#include <cstdlib>
#include <fstream>

#include "outlier/error.hpp"

namespace outlier {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json to_json(const ProjectConfig& cfg) {
  const auto& p = cfg.pipeline;
  json j = {{"strategy", strategy_name(p.strategy)},
            {"rounds", p.rounds},
            {"paraphrases_per_seed", p.paraphrases_per_seed},
            {"workers_per_seed", p.workers_per_seed},
            {"seeds_per_class", p.seeds_per_class},
            {"ranker", p.detection.ranker.name()},
            {"k_percent", p.detection.k_percent},
            {"seed", p.seed},
            {"word_vectors", cfg.has_word_vectors},
            {"split_ratio", cfg.split_ratio},
            {"generator", nullptr}};
  if (cfg.generator) j["generator"] = {{"seed", cfg.generator->seed}, {"dim", cfg.generator->dim}};
  return j;
}

ProjectConfig project_config_from_json(const nlohmann::json& j) {
  ProjectConfig cfg;
  auto& p = cfg.pipeline;
  p.strategy = parse_strategy(j.at("strategy").get<std::string>());
  p.rounds = j.at("rounds").get<int>();
  p.paraphrases_per_seed = j.at("paraphrases_per_seed").get<std::size_t>();
  p.workers_per_seed = j.at("workers_per_seed").get<std::size_t>();
  p.seeds_per_class = j.at("seeds_per_class").get<std::size_t>();
  p.detection.ranker = RankerSpec::parse(j.at("ranker").get<std::string>());
  p.detection.k_percent = j.at("k_percent").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  cfg.has_word_vectors = j.value("word_vectors", false);
  cfg.split_ratio = j.value("split_ratio", 0.85);
  if (const auto& g = j.at("generator"); !g.is_null()) {
    cfg.generator = GeneratorSpec{g.at("seed").get<std::uint64_t>(), g.at("dim").get<std::size_t>()};
  }
  p.validate();
  return cfg;
}

ProjectStore ProjectStore::create(const fs::path& root, const ProjectConfig& cfg,
                                  const std::optional<LabeledCorpus>& seeds,
                                  const std::optional<fs::path>& word_vectors) {
  cfg.pipeline.validate();
  if (fs::exists(root / "project.json")) throw Error("a project already exists in " + root.string());
  ProjectConfig stored = cfg;
  stored.has_word_vectors = word_vectors.has_value();
  if (cfg.pipeline.detection.ranker.needs_word_vectors() && !stored.has_word_vectors && !cfg.generator) {
    throw Error("ranker '" + cfg.pipeline.detection.ranker.name() +
                "' needs word vectors; supply a vectors file or use the generator");
  }
  if (cfg.pipeline.detection.ranker.needs_precomputed()) {
    throw Error("precomputed embeddings cannot rank newly collected paraphrases");
  }
  LabeledCorpus initial;
  if (seeds) {
    initial = *seeds;
  } else if (cfg.generator) {
    initial = ParaphraseGenerator(default_generator_config(cfg.generator->seed))
                  .initial_seeds(cfg.pipeline.seeds_per_class);
  } else {
    throw Error("a project needs seed utterances or the generator");
  }
  if (initial.empty()) throw Error("no seed utterances");

  fs::create_directories(root);
  if (word_vectors) {
    load_word_vectors(*word_vectors);  // reject unreadable files before copying
    fs::copy_file(*word_vectors, root / "vectors.txt", fs::copy_options::overwrite_existing);
  }
  save_corpus(root / "seeds.jsonl", initial);
  std::ofstream out(root / "project.json");
  out << to_json(stored).dump(2) << '\n';
  if (!out) throw Error("cannot write " + (root / "project.json").string());
  return ProjectStore(root, stored);
}

ProjectStore ProjectStore::open(const fs::path& root) {
  std::ifstream in(root / "project.json");
  if (!in) throw Error("no project found in " + root.string());
  json j;
  try {
    j = json::parse(in);
    return ProjectStore(root, project_config_from_json(j));
  } catch (const json::exception& e) {
    throw Error("invalid project.json in " + root.string() + ": " + e.what());
  }
}

std::optional<fs::path> ProjectStore::root_from_env() {
  const char* v = std::getenv("OUTLIER_STORE");
  if (!v || !*v) return std::nullopt;
  return fs::path(v);
}

LabeledCorpus ProjectStore::seeds() const { return load_corpus(root_ / "seeds.jsonl"); }

std::optional<WordVectorTable> ProjectStore::word_vectors() const {
  if (cfg_.has_word_vectors) return load_word_vectors(root_ / "vectors.txt");
  if (auto g = generator()) return g->word_vectors(cfg_.generator->dim);
  return std::nullopt;
}

std::optional<ParaphraseGenerator> ProjectStore::generator() const {
  if (!cfg_.generator) return std::nullopt;
  return ParaphraseGenerator(default_generator_config(cfg_.generator->seed));
}

}  // namespace outlier

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "outlier/detect.hpp"
#include "outlier/embed.hpp"
#include "outlier/error.hpp"
#include "outlier/eval.hpp"
#include "outlier/generator.hpp"
#include "outlier/http_server.hpp"
#include "outlier/pipeline.hpp"
#include "outlier/service.hpp"
#include "outlier/store.hpp"
#include "outlier/synth.hpp"

namespace fs = std::filesystem;
using namespace outlier;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string file_stem_for(std::string name) {
  for (char& c : name) {
    if (c == ':' || c == '/' || c == '\\') c = '_';
  }
  return name;
}

std::vector<RankerSpec> parse_rankers(const std::vector<std::string>& names) {
  std::vector<RankerSpec> out;
  for (const auto& n : names) out.push_back(RankerSpec::parse(n));
  return out;
}

struct EmbeddingInputs {
  std::optional<WordVectorTable> words;
  std::optional<EmbeddingMatrix> precomputed;

  EmbeddingContext context(SifNormalization norm) const {
    EmbeddingContext ctx;
    ctx.words = words ? &*words : nullptr;
    ctx.precomputed = precomputed ? &*precomputed : nullptr;
    ctx.sif.normalization = norm;
    return ctx;
  }
};

void check_inputs(const std::vector<RankerSpec>& rankers, const EmbeddingInputs& in) {
  for (const auto& r : rankers) {
    if (r.needs_word_vectors() && !in.words) throw Error("ranker '" + r.name() + "' needs --vectors");
    if (r.needs_precomputed() && !in.precomputed) throw Error("ranker '" + r.name() + "' needs --precomputed");
  }
}

SifNormalization parse_sif_norm(const std::string& s) {
  if (s == "tokens") return SifNormalization::TokenCount;
  if (s == "weights") return SifNormalization::WeightSum;
  throw Error("unknown SIF normalization '" + s + "' (tokens|weights)");
}

fs::path resolve_store(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (auto env = ProjectStore::root_from_env()) return *env;
  throw Error("no store given: pass --store or set OUTLIER_STORE");
}

HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier ranking, error triage and diversity-driven data collection"};
  app.require_subcommand(1);

  // detect
  std::string corpus_path, vectors_path, precomputed_path, out_dir, method = "average", sif_norm = "tokens";
  double k_percent = 10.0;
  std::uint64_t seed = 0;
  auto* detect = app.add_subcommand("detect", "Rank each class of a corpus by outlierness");
  detect->add_option("--corpus", corpus_path, "Corpus (JSON lines)")->required()->check(CLI::ExistingFile);
  detect->add_option("--method", method, "Ranker, e.g. average or borda:average+sif")->capture_default_str();
  detect->add_option("--k", k_percent, "Percent of each class to flag")->capture_default_str();
  detect->add_option("--vectors", vectors_path, "Word vectors (word v1 ... vd)")->check(CLI::ExistingFile);
  detect->add_option("--precomputed", precomputed_path, "Sentence vectors (JSON lines id, vector)")
      ->check(CLI::ExistingFile);
  detect->add_option("--sif-norm", sif_norm, "SIF normalization: tokens or weights")->capture_default_str();
  detect->add_option("--seed", seed, "Seed for random rankers")->capture_default_str();
  detect->add_option("--out", out_dir, "Directory for one ranked-list file per class")->required();

  // bench
  std::vector<std::string> methods{"random", "bow", "average", "sif", "borda:average+sif"};
  std::string truth_path;
  double p = 0.04;
  int step = 5;
  bool synthetic = false;
  SyntheticCorpusConfig synth_cfg;
  auto* bench = app.add_subcommand("bench", "Score rankers against injected or labeled errors");
  bench->add_option("--corpus", corpus_path, "Corpus; the synthetic corpus is used when omitted")
      ->check(CLI::ExistingFile);
  bench->add_flag("--synthetic", synthetic, "Use the synthetic corpus and its word vectors");
  bench->add_option("--vectors", vectors_path, "Word vectors")->check(CLI::ExistingFile);
  bench->add_option("--precomputed", precomputed_path, "Sentence vectors")->check(CLI::ExistingFile);
  bench->add_option("--truth", truth_path, "Labeled errors (JSON lines with id); skips injection")
      ->check(CLI::ExistingFile);
  bench->add_option("--p", p, "Fraction of each class to inject")->capture_default_str();
  bench->add_option("--methods", methods, "Comma-separated rankers")->delimiter(',')->capture_default_str();
  bench->add_option("--k", k_percent, "Recall cutoff in percent")->capture_default_str();
  bench->add_option("--step", step, "Recall curve step in percent")->capture_default_str();
  bench->add_option("--seed", seed, "Injection and ranking seed")->capture_default_str();
  bench->add_option("--synthetic-seed", synth_cfg.seed, "Seed of the synthetic corpus")->capture_default_str();
  bench->add_option("--sif-norm", sif_norm, "SIF normalization: tokens or weights")->capture_default_str();
  bench->add_option("--out", out_dir, "Directory for the table, curves and chart");

  // metrics
  std::string test_path;
  MetricConfig metric_cfg;
  auto* metrics = app.add_subcommand("metrics", "Diversity of a corpus and coverage of a test corpus");
  metrics->add_option("--corpus", corpus_path, "Corpus (training side for coverage)")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--test", test_path, "Test corpus for coverage")->check(CLI::ExistingFile);
  metrics->add_option("--max-n", metric_cfg.max_n, "Longest n-gram")->capture_default_str();

  // simulate
  std::string strategy = "all";
  PipelineConfig pipe_cfg;
  std::uint64_t generator_seed = 11;
  std::string ranker_name = pipe_cfg.detection.ranker.name();
  auto* simulate = app.add_subcommand("simulate", "Run the collection pipeline with synthetic workers");
  simulate->add_option("--strategy", strategy, "same, random, unique or all")->capture_default_str();
  simulate->add_option("--rounds", pipe_cfg.rounds, "Rounds per strategy")->capture_default_str();
  simulate->add_option("--seeds-per-class", pipe_cfg.seeds_per_class)->capture_default_str();
  simulate->add_option("--workers", pipe_cfg.workers_per_seed, "Workers per seed")->capture_default_str();
  simulate->add_option("--paraphrases", pipe_cfg.paraphrases_per_seed, "Paraphrases per worker")
      ->capture_default_str();
  simulate->add_option("--ranker", ranker_name, "Validation-queue ranker")->capture_default_str();
  simulate->add_option("--k", pipe_cfg.detection.k_percent, "Percent flagged per class")->capture_default_str();
  simulate->add_option("--seed", pipe_cfg.seed, "Pipeline seed")->capture_default_str();
  simulate->add_option("--generator-seed", generator_seed, "Paraphrase generator seed")->capture_default_str();
  simulate->add_option("--out", out_dir, "Directory for tables and final datasets");

  // split
  std::string train_path;
  double ratio = 0.85;
  auto* split = app.add_subcommand("split", "Seeded per-class train/test split");
  split->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  split->add_option("--ratio", ratio, "Training fraction")->capture_default_str();
  split->add_option("--seed", seed)->capture_default_str();
  split->add_option("--train", train_path)->required();
  split->add_option("--test", test_path)->required();

  // synth
  std::string vectors_out;
  auto* synth = app.add_subcommand("synth", "Write the synthetic corpus and its word vectors");
  synth->add_option("--corpus", corpus_path, "Output corpus")->required();
  synth->add_option("--vectors", vectors_out, "Output word vectors")->required();
  synth->add_option("--classes", synth_cfg.classes)->capture_default_str();
  synth->add_option("--per-class", synth_cfg.per_class)->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed)->capture_default_str();

  // init
  std::string store_flag, seeds_path;
  bool use_generator = false;
  auto* init = app.add_subcommand("init", "Create a project store for the review service");
  init->add_option("--store", store_flag, "Store directory (default: $OUTLIER_STORE)");
  init->add_option("--seeds", seeds_path, "First-round seeds (JSON lines)")->check(CLI::ExistingFile);
  init->add_option("--vectors", vectors_path, "Word vectors")->check(CLI::ExistingFile);
  init->add_flag("--generator", use_generator, "Attach the synthetic paraphrase generator");
  init->add_option("--generator-seed", generator_seed)->capture_default_str();
  init->add_option("--strategy", strategy, "same, random or unique")->capture_default_str();
  init->add_option("--rounds", pipe_cfg.rounds)->capture_default_str();
  init->add_option("--seeds-per-class", pipe_cfg.seeds_per_class)->capture_default_str();
  init->add_option("--workers", pipe_cfg.workers_per_seed)->capture_default_str();
  init->add_option("--paraphrases", pipe_cfg.paraphrases_per_seed)->capture_default_str();
  init->add_option("--ranker", ranker_name)->capture_default_str();
  init->add_option("--k", pipe_cfg.detection.k_percent)->capture_default_str();
  init->add_option("--seed", pipe_cfg.seed)->capture_default_str();

  // serve
  std::string host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the review API over a project store");
  serve->add_option("--store", store_flag, "Store directory (default: $OUTLIER_STORE)");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--ui", ui_dir, "Static UI directory served at /")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) {
      const auto corpus = load_corpus(corpus_path);
      const auto ranker = RankerSpec::parse(method);
      EmbeddingInputs in;
      if (!vectors_path.empty()) in.words = load_word_vectors(vectors_path);
      if (!precomputed_path.empty()) in.precomputed = load_precomputed(precomputed_path);
      check_inputs({ranker}, in);
      const DetectionConfig cfg{ranker, k_percent, seed};
      const auto lists = detect_all_classes(corpus, in.context(parse_sif_norm(sif_norm)), cfg);
      for (const auto& [key, list] : lists) {
        auto out = open_output(fs::path(out_dir) / (file_stem_for(key) + ".jsonl"));
        write_ranked_list(out, list);
        std::cout << key << '\t' << list.size() << " ranked\t" << cutoff_count(list.size(), k_percent)
                  << " flagged\n";
      }
    } else if (bench->parsed()) {
      const auto rankers = parse_rankers(methods);
      EmbeddingInputs in;
      LabeledCorpus corpus;
      if (corpus_path.empty() || synthetic) {
        if (!corpus_path.empty()) throw Error("--synthetic and --corpus are mutually exclusive");
        auto s = make_synthetic_corpus(synth_cfg);
        corpus = std::move(s.corpus);
        in.words = std::move(s.vectors);
      } else {
        corpus = load_corpus(corpus_path);
      }
      if (!vectors_path.empty()) in.words = load_word_vectors(vectors_path);
      if (!precomputed_path.empty()) in.precomputed = load_precomputed(precomputed_path);
      check_inputs(rankers, in);
      DetectionConfig cfg;
      cfg.k_percent = k_percent;
      cfg.seed = seed;
      const auto ctx = in.context(parse_sif_norm(sif_norm));
      BenchmarkResult result;
      if (!truth_path.empty()) {
        std::ifstream t(truth_path);
        result = run_benchmark(corpus, read_ground_truth(t, corpus, truth_path), rankers, ctx, cfg, step);
      } else {
        result = run_benchmark(corpus, InjectionConfig{p, seed}, rankers, ctx, cfg, step);
      }
      write_benchmark_table(std::cout, result);
      if (!out_dir.empty()) {
        auto table = open_output(fs::path(out_dir) / "table.tsv");
        write_benchmark_table(table, result);
        for (const auto& [name, curve] : result.curves) {
          auto c = open_output(fs::path(out_dir) / "curves" / (file_stem_for(name) + ".tsv"));
          write_curve(c, curve);
        }
        auto svg = open_output(fs::path(out_dir) / "recall.svg");
        write_curve_svg(svg, result.curves);
      }
    } else if (metrics->parsed()) {
      const auto corpus = load_corpus(corpus_path);
      std::cout << "diversity\t" << diversity(corpus, metric_cfg) << '\n';
      if (!test_path.empty()) {
        std::cout << "coverage\t" << coverage(corpus, load_corpus(test_path), metric_cfg) << '\n';
      }
    } else if (simulate->parsed()) {
      pipe_cfg.detection.ranker = RankerSpec::parse(ranker_name);
      SimulationOptions options;
      if (strategy != "all") options.strategies = {parse_strategy(strategy)};
      const auto result = run_simulation(pipe_cfg, default_generator_config(generator_seed), options);
      write_round_table(std::cout, result);
      std::cout << '\n';
      write_coverage_table(std::cout, result);
      if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        auto rounds = open_output(dir / "rounds.tsv");
        write_round_table(rounds, result);
        auto cov = open_output(dir / "coverage.tsv");
        write_coverage_table(cov, result);
        for (const auto& o : result.outcomes) {
          const std::string name(strategy_name(o.strategy));
          auto f = open_output(dir / name / "final.jsonl");
          write_corpus(f, o.final_dataset);
          auto tr = open_output(dir / name / "train.jsonl");
          write_corpus(tr, o.split.train);
          auto te = open_output(dir / name / "test.jsonl");
          write_corpus(te, o.split.test);
        }
      }
      for (const auto& o : result.outcomes) {
        for (const auto& w : o.warnings) std::cerr << strategy_name(o.strategy) << ": " << w << '\n';
      }
    } else if (split->parsed()) {
      const auto res = split_dataset(load_corpus(corpus_path), ratio, seed);
      save_corpus(train_path, res.train);
      save_corpus(test_path, res.test);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "train\t" << res.train.size() << "\ntest\t" << res.test.size() << '\n';
    } else if (synth->parsed()) {
      const auto s = make_synthetic_corpus(synth_cfg);
      save_corpus(corpus_path, s.corpus);
      auto out = open_output(vectors_out);
      write_word_vectors(out, s.vectors, s.vocabulary);
    } else if (init->parsed()) {
      ProjectConfig cfg;
      cfg.pipeline = pipe_cfg;
      cfg.pipeline.strategy = parse_strategy(strategy == "all" ? "unique" : strategy);
      cfg.pipeline.detection.ranker = RankerSpec::parse(ranker_name);
      if (use_generator) cfg.generator = GeneratorSpec{generator_seed, 32};
      std::optional<LabeledCorpus> seeds;
      if (!seeds_path.empty()) seeds = load_corpus(seeds_path);
      std::optional<fs::path> vectors;
      if (!vectors_path.empty()) vectors = fs::path(vectors_path);
      const auto root = resolve_store(store_flag);
      ProjectStore::create(root, cfg, seeds, vectors);
      std::cout << "created project in " << root.string() << '\n';
    } else if (serve->parsed()) {
      ReviewService service(ProjectStore::open(resolve_store(store_flag)));
      std::optional<fs::path> ui;
      if (!ui_dir.empty()) ui = fs::path(ui_dir);
      HttpServer server(service, ui);
      const int bound = server.bind(host, port);
      std::cout << "listening on http://" << host << ':' << bound << std::endl;
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      server.listen();
      g_server = nullptr;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

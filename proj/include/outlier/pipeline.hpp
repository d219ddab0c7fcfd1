#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "outlier/detect.hpp"
#include "outlier/eval.hpp"
#include "outlier/generator.hpp"
#include "outlier/text.hpp"

namespace outlier {

enum class Strategy { Same, Random, Unique };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

struct PipelineConfig {
  Strategy strategy = Strategy::Unique;
  int rounds = 3;
  std::size_t paraphrases_per_seed = 5;
  std::size_t workers_per_seed = 15;
  std::size_t seeds_per_class = 3;
  DetectionConfig detection{RankerSpec{{Method::Average, Method::Sif}}, 10.0, 0};
  std::uint64_t seed = 0;

  void validate() const;
};

enum class VerdictLabel { Error, Unique };
enum class VerdictSource { Human, SyntheticOracle };

std::string_view verdict_label_name(VerdictLabel l);
VerdictLabel parse_verdict_label(std::string_view name);
std::string_view verdict_source_name(VerdictSource s);
VerdictSource parse_verdict_source(std::string_view name);

struct Verdict {
  std::string id;
  VerdictLabel label = VerdictLabel::Unique;
  VerdictSource source = VerdictSource::Human;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class RoundPhase { Collecting, Validating, Closed };
std::string_view phase_name(RoundPhase p);

/// Which seed a collected paraphrase was written for.
struct Provenance {
  std::string seed_id;
  bool noise = false;  // generator bookkeeping: known-bad output

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SeedSelection {
  std::vector<Utterance> seeds;
  std::size_t random_fallbacks = 0;

  friend bool operator==(const SeedSelection&, const SeedSelection&) = default;
};

struct RoundState {
  int round = 0;
  RoundPhase phase = RoundPhase::Collecting;
  std::map<std::string, std::vector<Utterance>> seeds;
  LabeledCorpus collected;
  std::map<std::string, Provenance> provenance;
  std::map<std::string, RankedList> ranked;
  /// Validation queue per class, most-outlying first.
  std::map<std::string, std::vector<std::string>> flagged;
  std::map<std::string, Verdict> verdicts;
  /// Human seed-disambiguation judgments: id -> keep.
  std::map<std::string, bool> disambiguation;
  std::map<std::string, SeedSelection> next_seeds;
  std::vector<std::string> warnings;

  bool is_flagged(std::string_view id) const;
  std::size_t flagged_count() const;
  std::size_t pending_verdicts() const;
  /// nullptr when the id is not a seed of this round.
  const Utterance* find_seed(std::string_view id) const;
  /// Collected utterances minus those with an error verdict.
  LabeledCorpus validated() const;

  friend bool operator==(const RoundState&, const RoundState&) = default;
};

struct DisambiguationResult {
  bool keep = false;
  std::string nearest_id;  // nearest utterance of another class
  double own_mean_distance = 0.0;
  double nearest_distance = 0.0;
};

/// Keeps the candidate iff it is strictly closer to its own class mean than
/// to the nearest utterance of any other class. `embeddings` must hold a row
/// for every utterance of `corpus` (which includes the candidate).
DisambiguationResult disambiguate_seed(const Utterance& candidate, const LabeledCorpus& corpus,
                                       const EmbeddingMatrix& embeddings);

/// Sentence vectors for disambiguation: averaged word vectors when available,
/// bag of words over the corpus vocabulary otherwise.
EmbeddingMatrix disambiguation_embeddings(const LabeledCorpus& corpus, const EmbeddingContext& ctx);

/// Full ranked list for every class of the round's collected data.
std::map<std::string, RankedList> rank_round(const RoundState& round, const DetectionConfig& cfg,
                                             const EmbeddingContext& ctx);

/// Next-round seeds for a validated round.
///   same   -> the first round's seeds
///   random -> seeded uniform draw from the validated items
///   unique -> unique-verdict outliers in rank order that pass disambiguation,
///             topped up with random draws when there are too few
std::map<std::string, SeedSelection> select_seeds(const RoundState& round, Strategy strategy,
                                                  const PipelineConfig& cfg,
                                                  const std::map<std::string, std::vector<Utterance>>& first_seeds,
                                                  const EmbeddingContext& ctx,
                                                  std::vector<std::string>* warnings = nullptr);

enum class IngestStatus { Added, Duplicate, AlreadyPresent };

struct IngestResult {
  IngestStatus status = IngestStatus::Added;
  std::string id;  // id of the stored utterance (the earlier one for duplicates)
};

/// Multi-round collection state machine. Every mutation is recorded as an
/// event and applied through the same path used for replay, so feeding the
/// emitted events to a fresh run reproduces its state exactly.
class PipelineRun {
 public:
  using EventSink = std::function<void(const nlohmann::json&)>;

  explicit PipelineRun(PipelineConfig cfg, EventSink sink = {});

  const PipelineConfig& config() const { return cfg_; }
  void set_sink(EventSink sink) { sink_ = std::move(sink); }

  bool has_round() const { return !rounds_.empty(); }
  const RoundState& current() const;
  const std::vector<RoundState>& rounds() const { return rounds_; }

  /// Opens round 1 from the given seeds.
  void start_first_round(const LabeledCorpus& seeds);
  /// Opens the next round from the previous round's selected seeds.
  void start_next_round();

  /// One paraphrase for a seed of the current round. Throws NotFoundError for
  /// an unknown seed, StateError outside the collection phase.
  IngestResult ingest(const std::string& seed_id, const std::string& id, const std::string& text,
                      bool noise = false);
  /// paraphrases_per_seed x workers_per_seed generator paraphrases per seed.
  void collect_from_generator(const ParaphraseGenerator& generator);

  /// Runs detection and queues the top k% of every class for review. Throws
  /// StateError outside the collection phase or when a seed class collected nothing.
  void build_validation_queue(const EmbeddingContext& ctx);

  /// Returns false when the identical verdict was already recorded. A
  /// different label for the same id replaces the earlier verdict.
  bool record_verdict(const Verdict& v);
  /// Labels every pending flagged item: generator noise -> error, else unique.
  void apply_synthetic_verdicts();
  /// Human seed-disambiguation judgment for a unique-verdict item.
  bool record_disambiguation(const std::string& id, bool keep);

  /// Selects the next seeds and closes the round. Throws StateError while
  /// verdicts are pending.
  void close_round(const EmbeddingContext& ctx);

  /// Union of all rounds' validated data, de-duplicated per class.
  LabeledCorpus final_dataset() const;

  /// Applies a recorded event without re-emitting it.
  void replay(const nlohmann::json& event);
  std::size_t events_applied() const { return seq_; }

  friend bool operator==(const PipelineRun& a, const PipelineRun& b) {
    return a.rounds_ == b.rounds_ && a.seq_ == b.seq_;
  }

 private:
  void emit(nlohmann::json event);
  void apply(const nlohmann::json& event);
  RoundState& mutable_current();

  PipelineConfig cfg_;
  EventSink sink_;
  std::vector<RoundState> rounds_;
  std::size_t seq_ = 0;
};

// ---------------------------------------------------------------------------
// Simulation

struct RoundSummary {
  int round = 0;
  std::size_t samples = 0;
  double diversity = 0.0;
  std::size_t flagged = 0;
  std::size_t errors_found = 0;
  std::size_t random_fallbacks = 0;
};

struct SplitResult {
  LabeledCorpus train;
  LabeledCorpus test;
  std::vector<std::string> warnings;
};

/// Per-class seeded shuffle, then the first round(ratio * n) items go to
/// train. Classes with fewer than two items go entirely to train.
SplitResult split_dataset(const LabeledCorpus& corpus, double ratio, std::uint64_t seed);

struct StrategyOutcome {
  Strategy strategy = Strategy::Same;
  std::vector<RoundSummary> rounds;
  LabeledCorpus first_round;  // collected data of round 1
  LabeledCorpus final_dataset;
  double final_diversity = 0.0;
  SplitResult split;
  std::set<std::string> error_ids;  // every error verdict across rounds
  std::vector<std::string> warnings;
};

struct SimulationResult {
  std::vector<StrategyOutcome> outcomes;
  /// (train strategy, test strategy) -> coverage of the test split by the train split.
  std::map<std::pair<std::string, std::string>, double> coverage;
};

struct SimulationOptions {
  std::vector<Strategy> strategies{Strategy::Same, Strategy::Random, Strategy::Unique};
  double split_ratio = 0.85;
  std::size_t vector_dim = 32;
  MetricConfig metrics;
};

/// Runs every strategy end to end with the generator standing in for crowd
/// workers and the synthetic oracle for reviewers.
SimulationResult run_simulation(const PipelineConfig& cfg, const GeneratorConfig& generator,
                                const SimulationOptions& options = {});

/// Per-round diversity and sample counts: one row per strategy, one column per round plus "all".
void write_round_table(std::ostream& out, const SimulationResult& result);
void write_coverage_table(std::ostream& out, const SimulationResult& result);

}  // namespace outlier

#include "outlier/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "outlier/error.hpp"
#include "outlier/rng.hpp"

namespace outlier {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view name, const std::pair<E, std::string_view> (&table)[N], const char* what) {
  for (const auto& [value, label] : table) {
    if (label == name) return value;
  }
  throw Error(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

template <class E, std::size_t N>
std::string_view enum_name(E value, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, label] : table) {
    if (v == value) return label;
  }
  return "?";
}

constexpr std::pair<Strategy, std::string_view> kStrategies[] = {
    {Strategy::Same, "same"}, {Strategy::Random, "random"}, {Strategy::Unique, "unique"}};
constexpr std::pair<VerdictLabel, std::string_view> kLabels[] = {{VerdictLabel::Error, "error"},
                                                                 {VerdictLabel::Unique, "unique"}};
constexpr std::pair<VerdictSource, std::string_view> kSources[] = {
    {VerdictSource::Human, "human"}, {VerdictSource::SyntheticOracle, "synthetic-oracle"}};
constexpr std::pair<RoundPhase, std::string_view> kPhases[] = {{RoundPhase::Collecting, "collecting"},
                                                               {RoundPhase::Validating, "validating"},
                                                               {RoundPhase::Closed, "closed"}};

std::string round_tag(const char* what, int round, const std::string& class_key) {
  return std::string(what) + "/r" + std::to_string(round) + "/" + class_key;
}

std::vector<Utterance> flatten(const LabeledCorpus& corpus) {
  std::vector<Utterance> out;
  out.reserve(corpus.size());
  for (const auto& [key, members] : corpus.classes()) out.insert(out.end(), members.begin(), members.end());
  return out;
}

/// Up to `n` members not in `exclude`, uniformly without replacement.
std::vector<Utterance> draw_random(const std::vector<Utterance>& members, const std::set<std::string>& exclude,
                                   std::size_t n, Rng& rng) {
  std::vector<const Utterance*> pool;
  for (const auto& u : members) {
    if (!exclude.count(u.id)) pool.push_back(&u);
  }
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < pool.size() && out.size() < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out.push_back(*pool[i]);
  }
  return out;
}

json seeds_to_json(const std::map<std::string, std::vector<Utterance>>& seeds) {
  json out = json::object();
  for (const auto& [key, list] : seeds) {
    json arr = json::array();
    for (const auto& u : list) arr.push_back(to_record(u));
    out[key] = std::move(arr);
  }
  return out;
}

std::vector<Utterance> utterances_from_json(const json& arr) {
  std::vector<Utterance> out;
  for (const auto& rec : arr) out.push_back(from_record(rec));
  return out;
}

json ranked_to_json(const RankedList& list) {
  json entries = json::array();
  for (const auto& e : list.entries) entries.push_back({{"id", e.id}, {"score", e.score}, {"rank", e.rank}});
  return {{"method", list.method}, {"entries", std::move(entries)}};
}

RankedList ranked_from_json(const std::string& class_key, const json& j) {
  RankedList list;
  list.class_key = class_key;
  list.method = j.at("method").get<std::string>();
  for (const auto& e : j.at("entries")) {
    list.entries.push_back({e.at("id").get<std::string>(), e.at("score").get<double>(), e.at("rank").get<std::size_t>()});
  }
  return list;
}

}  // namespace

std::string_view strategy_name(Strategy s) { return enum_name(s, kStrategies); }
Strategy parse_strategy(std::string_view name) { return parse_enum(name, kStrategies, "strategy"); }
std::string_view verdict_label_name(VerdictLabel l) { return enum_name(l, kLabels); }
VerdictLabel parse_verdict_label(std::string_view name) { return parse_enum(name, kLabels, "verdict label"); }
std::string_view verdict_source_name(VerdictSource s) { return enum_name(s, kSources); }
VerdictSource parse_verdict_source(std::string_view name) { return parse_enum(name, kSources, "verdict source"); }
std::string_view phase_name(RoundPhase p) { return enum_name(p, kPhases); }

void PipelineConfig::validate() const {
  if (rounds < 1) throw Error("rounds must be at least 1");
  if (paraphrases_per_seed < 1 || workers_per_seed < 1 || seeds_per_class < 1) {
    throw Error("paraphrase, worker and seed counts must be at least 1");
  }
  detection.validate();
}

// ---------------------------------------------------------------------------
// RoundState

bool RoundState::is_flagged(std::string_view id) const {
  for (const auto& [key, ids] : flagged) {
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) return true;
  }
  return false;
}

std::size_t RoundState::flagged_count() const {
  std::size_t n = 0;
  for (const auto& [key, ids] : flagged) n += ids.size();
  return n;
}

std::size_t RoundState::pending_verdicts() const {
  std::size_t n = 0;
  for (const auto& [key, ids] : flagged) {
    for (const auto& id : ids) n += verdicts.count(id) ? 0 : 1;
  }
  return n;
}

const Utterance* RoundState::find_seed(std::string_view id) const {
  for (const auto& [key, list] : seeds) {
    for (const auto& u : list) {
      if (u.id == id) return &u;
    }
  }
  return nullptr;
}

LabeledCorpus RoundState::validated() const {
  LabeledCorpus out;
  for (const auto& [key, members] : collected.classes()) {
    for (const auto& u : members) {
      auto it = verdicts.find(u.id);
      if (it == verdicts.end() || it->second.label != VerdictLabel::Error) out.add(u);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seed selection

DisambiguationResult disambiguate_seed(const Utterance& candidate, const LabeledCorpus& corpus,
                                       const EmbeddingMatrix& embeddings) {
  if (corpus.classes().size() < 2) throw Error("disambiguation needs at least two classes");
  auto row_of = [&](const std::string& id) {
    auto i = embeddings.index_of(id);
    if (!i) throw Error("no embedding for '" + id + "'");
    return embeddings.row(*i);
  };
  EmbeddingMatrix own(embeddings.dim());
  for (const auto& u : corpus.members(candidate.class_key)) own.append(u.id, row_of(u.id));
  const Vector mean = class_mean(own);
  const auto c = row_of(candidate.id);

  DisambiguationResult r;
  r.own_mean_distance = euclidean_distance(c, mean);
  r.nearest_distance = std::numeric_limits<double>::infinity();
  for (const auto& [key, members] : corpus.classes()) {
    if (key == candidate.class_key) continue;
    for (const auto& u : members) {
      const double d = euclidean_distance(c, row_of(u.id));
      if (d < r.nearest_distance || (d == r.nearest_distance && u.id < r.nearest_id)) {
        r.nearest_distance = d;
        r.nearest_id = u.id;
      }
    }
  }
  r.keep = r.own_mean_distance < r.nearest_distance;
  return r;
}

EmbeddingMatrix disambiguation_embeddings(const LabeledCorpus& corpus, const EmbeddingContext& ctx) {
  const auto all = flatten(corpus);
  return ctx.words ? embed_average(all, *ctx.words) : embed_bow(all);
}

std::map<std::string, RankedList> rank_round(const RoundState& round, const DetectionConfig& cfg,
                                             const EmbeddingContext& ctx) {
  return detect_all_classes(round.collected, ctx, cfg);
}

std::map<std::string, SeedSelection> select_seeds(const RoundState& round, Strategy strategy,
                                                  const PipelineConfig& cfg,
                                                  const std::map<std::string, std::vector<Utterance>>& first_seeds,
                                                  const EmbeddingContext& ctx,
                                                  std::vector<std::string>* warnings) {
  const LabeledCorpus validated = round.validated();
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  std::optional<EmbeddingMatrix> embeddings;
  const bool can_disambiguate = validated.classes().size() >= 2;
  if (strategy == Strategy::Unique && can_disambiguate) embeddings = disambiguation_embeddings(validated, ctx);

  std::map<std::string, SeedSelection> out;
  for (const auto& [key, current_seeds] : round.seeds) {
    SeedSelection& sel = out[key];
    if (strategy == Strategy::Same) {
      auto it = first_seeds.find(key);
      sel.seeds = it != first_seeds.end() ? it->second : current_seeds;
      continue;
    }
    if (!validated.has_class(key)) {
      warn("class '" + key + "': no validated items, keeping the current seeds");
      sel.seeds = current_seeds;
      continue;
    }
    const auto& members = validated.members(key);
    Rng rng(derive_seed(cfg.seed, round_tag("select", round.round, key)));
    if (strategy == Strategy::Random) {
      sel.seeds = draw_random(members, {}, cfg.seeds_per_class, rng);
      continue;
    }

    std::set<std::string> considered;
    if (auto f = round.flagged.find(key); f != round.flagged.end()) {
      for (const auto& id : f->second) {
        if (sel.seeds.size() == cfg.seeds_per_class) break;
        auto v = round.verdicts.find(id);
        if (v == round.verdicts.end() || v->second.label != VerdictLabel::Unique) continue;
        const Utterance* u = validated.find(id);
        if (!u) continue;
        bool keep = true;
        if (auto h = round.disambiguation.find(id); h != round.disambiguation.end()) {
          keep = h->second;
        } else if (embeddings) {
          keep = disambiguate_seed(*u, validated, *embeddings).keep;
        }
        considered.insert(id);  // rejected candidates are not drawn again as fallbacks
        if (keep) sel.seeds.push_back(*u);
      }
    }
    if (sel.seeds.size() < cfg.seeds_per_class) {
      auto extra = draw_random(members, considered, cfg.seeds_per_class - sel.seeds.size(), rng);
      sel.random_fallbacks = extra.size();
      sel.seeds.insert(sel.seeds.end(), extra.begin(), extra.end());
      warn("class '" + key + "': " + std::to_string(sel.random_fallbacks) +
           " seed(s) drawn at random for lack of validated unique outliers");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PipelineRun

PipelineRun::PipelineRun(PipelineConfig cfg, EventSink sink) : cfg_(std::move(cfg)), sink_(std::move(sink)) {
  cfg_.validate();
}

const RoundState& PipelineRun::current() const {
  if (rounds_.empty()) throw StateError("no round has been started");
  return rounds_.back();
}

RoundState& PipelineRun::mutable_current() {
  if (rounds_.empty()) throw StateError("no round has been started");
  return rounds_.back();
}

void PipelineRun::emit(json event) {
  event["seq"] = seq_ + 1;
  if (!event.contains("round")) event["round"] = rounds_.empty() ? 0 : rounds_.back().round;
  if (sink_) sink_(event);
  apply(event);
}

void PipelineRun::replay(const json& event) {
  const auto seq = event.at("seq").get<std::size_t>();
  if (seq != seq_ + 1) {
    throw Error("event sequence gap: expected " + std::to_string(seq_ + 1) + ", got " + std::to_string(seq));
  }
  apply(event);
}

void PipelineRun::apply(const json& event) {
  const std::string type = event.at("event").get<std::string>();
  if (type == "round-started") {
    RoundState r;
    r.round = event.at("round").get<int>();
    for (const auto& [key, arr] : event.at("seeds").items()) r.seeds[key] = utterances_from_json(arr);
    rounds_.push_back(std::move(r));
  } else if (type == "paraphrase-ingested") {
    RoundState& r = mutable_current();
    Utterance u = from_record(event.at("utterance"));
    r.provenance[u.id] = {event.at("seed_id").get<std::string>(), event.value("noise", false)};
    r.collected.add(std::move(u));
  } else if (type == "flagged") {
    RoundState& r = mutable_current();
    for (const auto& [key, list] : event.at("ranked").items()) r.ranked[key] = ranked_from_json(key, list);
    for (const auto& [key, ids] : event.at("flagged").items()) r.flagged[key] = ids.get<std::vector<std::string>>();
    r.phase = RoundPhase::Validating;
  } else if (type == "verdict") {
    RoundState& r = mutable_current();
    Verdict v{event.at("id").get<std::string>(), parse_verdict_label(event.at("label").get<std::string>()),
              parse_verdict_source(event.at("source").get<std::string>())};
    r.verdicts[v.id] = v;
  } else if (type == "disambiguation") {
    mutable_current().disambiguation[event.at("id").get<std::string>()] = event.at("keep").get<bool>();
  } else if (type == "seeds-selected") {
    RoundState& r = mutable_current();
    for (const auto& [key, sel] : event.at("seeds").items()) {
      r.next_seeds[key] = {utterances_from_json(sel.at("seeds")), sel.at("random_fallbacks").get<std::size_t>()};
    }
    for (const auto& w : event.at("warnings")) r.warnings.push_back(w.get<std::string>());
  } else if (type == "round-closed") {
    mutable_current().phase = RoundPhase::Closed;
  } else {
    throw Error("unknown event type '" + type + "'");
  }
  seq_ = event.at("seq").get<std::size_t>();
}

void PipelineRun::start_first_round(const LabeledCorpus& seeds) {
  if (!rounds_.empty()) throw StateError("the first round has already started");
  if (seeds.empty()) throw Error("no seed utterances");
  std::map<std::string, std::vector<Utterance>> by_class;
  for (const auto& [key, members] : seeds.classes()) by_class[key] = members;
  emit({{"event", "round-started"}, {"round", 1}, {"seeds", seeds_to_json(by_class)}});
}

void PipelineRun::start_next_round() {
  const RoundState& r = current();
  if (r.phase != RoundPhase::Closed) throw StateError("round " + std::to_string(r.round) + " is still open");
  if (r.round >= cfg_.rounds) {
    throw StateError("all " + std::to_string(cfg_.rounds) + " configured rounds have been run");
  }
  std::map<std::string, std::vector<Utterance>> seeds;
  for (const auto& [key, sel] : r.next_seeds) {
    if (sel.seeds.empty()) throw StateError("class '" + key + "' has no seeds for the next round");
    seeds[key] = sel.seeds;
  }
  emit({{"event", "round-started"}, {"round", r.round + 1}, {"seeds", seeds_to_json(seeds)}});
}

IngestResult PipelineRun::ingest(const std::string& seed_id, const std::string& id, const std::string& text,
                                 bool noise) {
  const RoundState& r = current();
  if (r.phase != RoundPhase::Collecting) {
    throw StateError("round " + std::to_string(r.round) + " is no longer collecting paraphrases");
  }
  const Utterance* seed = r.find_seed(seed_id);
  if (!seed) throw NotFoundError("unknown seed '" + seed_id + "'");

  std::string new_id = id.empty() ? "r" + std::to_string(r.round) + "-u" + std::to_string(seq_ + 1) : id;
  for (const auto& past : rounds_) {
    if (const Utterance* existing = past.collected.find(new_id)) {
      if (existing->text == text && existing->class_key == seed->class_key) {
        return {IngestStatus::AlreadyPresent, new_id};
      }
      throw StateError("id '" + new_id + "' is already used for a different paraphrase");
    }
  }
  Utterance u = make_utterance(new_id, text, seed->class_key);
  const std::string norm = normalized_text(text);
  if (r.collected.has_class(u.class_key)) {
    for (const auto& other : r.collected.members(u.class_key)) {
      if (normalized_text(other.text) == norm) return {IngestStatus::Duplicate, other.id};
    }
  }
  emit({{"event", "paraphrase-ingested"}, {"seed_id", seed_id}, {"noise", noise}, {"utterance", to_record(u)}});
  return {IngestStatus::Added, new_id};
}

void PipelineRun::collect_from_generator(const ParaphraseGenerator& generator) {
  const RoundState& r = current();
  const int round = r.round;
  const auto seeds = r.seeds;
  for (const auto& [key, list] : seeds) {
    for (std::size_t s = 0; s < list.size(); ++s) {
      for (std::size_t w = 0; w < cfg_.workers_per_seed; ++w) {
        const auto stream = derive_seed(cfg_.seed, "collect/r" + std::to_string(round) + "/w" + std::to_string(w));
        const auto out = generator.paraphrase(list[s], cfg_.paraphrases_per_seed, stream);
        for (std::size_t j = 0; j < out.size(); ++j) {
          const std::string id = "r" + std::to_string(round) + "-" + key + "-s" + std::to_string(s) + "-w" +
                                 std::to_string(w) + "-p" + std::to_string(j);
          ingest(list[s].id, id, out[j].text, out[j].noise);
        }
      }
    }
  }
}

void PipelineRun::build_validation_queue(const EmbeddingContext& ctx) {
  const RoundState& r = current();
  if (r.phase != RoundPhase::Collecting) throw StateError("the validation queue has already been built");
  for (const auto& [key, list] : r.seeds) {
    if (!r.collected.has_class(key)) throw StateError("class '" + key + "' has no collected paraphrases");
  }
  DetectionConfig det = cfg_.detection;
  det.seed = derive_seed(cfg_.seed, "detect/r" + std::to_string(r.round));
  const auto ranked = rank_round(r, det, ctx);
  json ranked_json = json::object(), flagged_json = json::object();
  for (const auto& [key, list] : ranked) {
    ranked_json[key] = ranked_to_json(list);
    flagged_json[key] = flag_top_k(list, det.k_percent);
  }
  emit({{"event", "flagged"}, {"ranked", std::move(ranked_json)}, {"flagged", std::move(flagged_json)}});
}

bool PipelineRun::record_verdict(const Verdict& v) {
  const RoundState& r = current();
  if (!r.collected.contains(v.id)) throw NotFoundError("unknown utterance '" + v.id + "'");
  if (r.phase != RoundPhase::Validating) {
    throw StateError("round " + std::to_string(r.round) + " is not accepting verdicts");
  }
  if (!r.is_flagged(v.id)) throw StateError("'" + v.id + "' is not in the validation queue");
  if (auto it = r.verdicts.find(v.id); it != r.verdicts.end() && it->second.label == v.label) return false;
  emit({{"event", "verdict"},
        {"id", v.id},
        {"label", verdict_label_name(v.label)},
        {"source", verdict_source_name(v.source)}});
  return true;
}

void PipelineRun::apply_synthetic_verdicts() {
  const RoundState& r = current();
  std::vector<Verdict> todo;
  for (const auto& [key, ids] : r.flagged) {
    for (const auto& id : ids) {
      if (r.verdicts.count(id)) continue;
      auto p = r.provenance.find(id);
      const bool noise = p != r.provenance.end() && p->second.noise;
      todo.push_back({id, noise ? VerdictLabel::Error : VerdictLabel::Unique, VerdictSource::SyntheticOracle});
    }
  }
  for (const auto& v : todo) record_verdict(v);
}

bool PipelineRun::record_disambiguation(const std::string& id, bool keep) {
  const RoundState& r = current();
  if (!r.collected.contains(id)) throw NotFoundError("unknown utterance '" + id + "'");
  if (r.phase != RoundPhase::Validating) {
    throw StateError("round " + std::to_string(r.round) + " is not accepting judgments");
  }
  auto v = r.verdicts.find(id);
  if (v == r.verdicts.end() || v->second.label != VerdictLabel::Unique) {
    throw StateError("'" + id + "' is not a validated unique outlier");
  }
  if (auto it = r.disambiguation.find(id); it != r.disambiguation.end() && it->second == keep) return false;
  emit({{"event", "disambiguation"}, {"id", id}, {"keep", keep}});
  return true;
}

void PipelineRun::close_round(const EmbeddingContext& ctx) {
  const RoundState& r = current();
  if (r.phase == RoundPhase::Closed) throw StateError("round " + std::to_string(r.round) + " is already closed");
  if (r.phase != RoundPhase::Validating) throw StateError("the validation queue has not been built");
  if (const auto pending = r.pending_verdicts(); pending > 0) {
    throw StateError(std::to_string(pending) + " flagged item(s) still need a verdict");
  }
  if (r.round < cfg_.rounds) {
    std::vector<std::string> warnings;
    const auto selection = select_seeds(r, cfg_.strategy, cfg_, rounds_.front().seeds, ctx, &warnings);
    json seeds = json::object();
    for (const auto& [key, sel] : selection) {
      json arr = json::array();
      for (const auto& u : sel.seeds) arr.push_back(to_record(u));
      seeds[key] = {{"seeds", std::move(arr)}, {"random_fallbacks", sel.random_fallbacks}};
    }
    emit({{"event", "seeds-selected"}, {"seeds", std::move(seeds)}, {"warnings", warnings}});
  }
  emit({{"event", "round-closed"}});
}

LabeledCorpus PipelineRun::final_dataset() const {
  LabeledCorpus all;
  for (const auto& r : rounds_) {
    const LabeledCorpus kept = r.validated();
    for (const auto& [key, members] : kept.classes()) {
      for (const auto& u : members) all.add(u);
    }
  }
  return dedupe(all).corpus;
}

// ---------------------------------------------------------------------------
// Simulation

SplitResult split_dataset(const LabeledCorpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must lie strictly between 0 and 1");
  SplitResult out;
  for (const auto& [key, members] : corpus.classes()) {
    if (members.size() < 2) {
      for (const auto& u : members) out.train.add(u);
      out.warnings.push_back("class '" + key + "' has fewer than 2 items; all kept for training");
      continue;
    }
    std::vector<Utterance> shuffled = members;
    Rng rng(derive_seed(seed, "split/" + key));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto n = shuffled.size();
    const auto n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))), 1, n - 1);
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? out.train : out.test).add(shuffled[i]);
  }
  return out;
}

SimulationResult run_simulation(const PipelineConfig& cfg, const GeneratorConfig& generator_cfg,
                                const SimulationOptions& options) {
  cfg.validate();
  options.metrics.validate();
  const ParaphraseGenerator generator(generator_cfg);
  const WordVectorTable vectors = generator.word_vectors(options.vector_dim);
  EmbeddingContext ctx;
  ctx.words = &vectors;
  const LabeledCorpus initial = generator.initial_seeds(cfg.seeds_per_class);

  SimulationResult result;
  for (Strategy strategy : options.strategies) {
    PipelineConfig run_cfg = cfg;
    run_cfg.strategy = strategy;
    PipelineRun run(run_cfg);
    StrategyOutcome outcome;
    outcome.strategy = strategy;
    for (int round = 1; round <= cfg.rounds; ++round) {
      if (round == 1) {
        run.start_first_round(initial);
      } else {
        run.start_next_round();
      }
      run.collect_from_generator(generator);
      run.build_validation_queue(ctx);
      run.apply_synthetic_verdicts();
      run.close_round(ctx);

      const RoundState& r = run.current();
      RoundSummary s;
      s.round = round;
      const LabeledCorpus kept = r.validated();
      s.samples = kept.size();
      s.diversity = diversity(kept, options.metrics);
      s.flagged = r.flagged_count();
      for (const auto& [id, v] : r.verdicts) {
        if (v.label == VerdictLabel::Error) {
          ++s.errors_found;
          outcome.error_ids.insert(id);
        }
      }
      for (const auto& [key, sel] : r.next_seeds) s.random_fallbacks += sel.random_fallbacks;
      outcome.warnings.insert(outcome.warnings.end(), r.warnings.begin(), r.warnings.end());
      outcome.rounds.push_back(s);
    }
    outcome.first_round = run.rounds().front().collected;
    outcome.final_dataset = run.final_dataset();
    outcome.final_diversity = diversity(outcome.final_dataset, options.metrics);
    outcome.split = split_dataset(outcome.final_dataset, options.split_ratio, cfg.seed);
    result.outcomes.push_back(std::move(outcome));
  }

  for (const auto& a : result.outcomes) {
    for (const auto& b : result.outcomes) {
      result.coverage[{std::string(strategy_name(a.strategy)), std::string(strategy_name(b.strategy))}] =
          coverage(a.split.train, b.split.test, options.metrics);
    }
  }
  return result;
}

namespace {

void write_cell(std::ostream& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  out << buf;
}

}  // namespace

void write_round_table(std::ostream& out, const SimulationResult& result) {
  std::size_t rounds = 0;
  for (const auto& o : result.outcomes) rounds = std::max(rounds, o.rounds.size());
  auto header = [&](const char* title) {
    out << title;
    for (std::size_t i = 1; i <= rounds; ++i) out << "\tround " << i;
    out << "\tall\n";
  };
  header("diversity");
  for (const auto& o : result.outcomes) {
    out << strategy_name(o.strategy);
    for (const auto& s : o.rounds) {
      out << '\t';
      write_cell(out, s.diversity);
    }
    out << '\t';
    write_cell(out, o.final_diversity);
    out << '\n';
  }
  out << '\n';
  header("samples");
  for (const auto& o : result.outcomes) {
    out << strategy_name(o.strategy);
    for (const auto& s : o.rounds) out << '\t' << s.samples;
    out << '\t' << o.final_dataset.size() << '\n';
  }
}

void write_coverage_table(std::ostream& out, const SimulationResult& result) {
  out << "train\\test";
  for (const auto& o : result.outcomes) out << '\t' << strategy_name(o.strategy);
  out << '\n';
  for (const auto& a : result.outcomes) {
    const std::string row(strategy_name(a.strategy));
    out << row;
    for (const auto& b : result.outcomes) {
      out << '\t';
      write_cell(out, result.coverage.at({row, std::string(strategy_name(b.strategy))}));
    }
    out << '\n';
  }
}

}  // namespace outlier

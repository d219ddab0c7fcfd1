#include <gtest/gtest.h>

#include <sstream>

#include "outlier/error.hpp"
#include "outlier/pipeline.hpp"
#include "outlier/round_log.hpp"

using namespace outlier;
using nlohmann::json;

namespace {

struct World {
  GeneratorConfig gen_cfg = default_generator_config();
  ParaphraseGenerator gen{gen_cfg};
  WordVectorTable words = gen.word_vectors(16);
  EmbeddingContext ctx;
  PipelineConfig cfg;

  World() {
    ctx.words = &words;
    cfg.workers_per_seed = 4;
    cfg.paraphrases_per_seed = 5;
    cfg.seeds_per_class = 2;
    cfg.seed = 3;
  }
};

LabeledCorpus two_class_seeds() {
  LabeledCorpus c;
  c.add(make_utterance("s-a", "set an alarm", "alarm"));
  c.add(make_utterance("s-b", "play some music", "music"));
  return c;
}

}  // namespace

TEST(Strategy, Names) {
  EXPECT_EQ(parse_strategy("unique"), Strategy::Unique);
  EXPECT_EQ(strategy_name(Strategy::Same), "same");
  EXPECT_THROW(parse_strategy("best"), Error);
}

TEST(PipelineConfig, Validation) {
  PipelineConfig c;
  c.rounds = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.workers_per_seed = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(PipelineRun, IngestRules) {
  PipelineRun run({});
  run.start_first_round(two_class_seeds());
  EXPECT_EQ(run.ingest("s-a", "p1", "wake me at six").status, IngestStatus::Added);
  auto dup = run.ingest("s-a", "p2", "Wake me  at six!");
  EXPECT_EQ(dup.status, IngestStatus::Duplicate);
  EXPECT_EQ(dup.id, "p1");
  EXPECT_EQ(run.ingest("s-a", "p1", "wake me at six").status, IngestStatus::AlreadyPresent);
  EXPECT_THROW(run.ingest("s-a", "p1", "something else"), StateError);
  EXPECT_THROW(run.ingest("nope", "p3", "text"), NotFoundError);
  // Same text in another class is not a duplicate.
  EXPECT_EQ(run.ingest("s-b", "p4", "wake me at six").status, IngestStatus::Added);
  EXPECT_EQ(run.current().collected.size(), 2u);
  EXPECT_EQ(run.current().provenance.at("p4").seed_id, "s-b");
}

TEST(PipelineRun, GeneratorCollectsAtMostPerSeedBudget) {
  World w;
  w.cfg.workers_per_seed = 15;
  PipelineRun run(w.cfg);
  LabeledCorpus one;
  one.add(w.gen.initial_seeds(1).members("alarm")[0]);
  run.start_first_round(one);
  run.collect_from_generator(w.gen);
  const auto n = run.current().collected.size();
  EXPECT_LE(n, 75u);
  EXPECT_GT(n, 10u);
}

TEST(PipelineRun, QueueSizesFollowCeilRule) {
  World w;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  const auto& r = run.current();
  EXPECT_EQ(r.phase, RoundPhase::Validating);
  for (const auto& [key, ids] : r.flagged) {
    const auto& list = r.ranked.at(key);
    EXPECT_EQ(ids.size(), cutoff_count(list.size(), 10.0));
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], list.entries[i].id);
  }
}

TEST(PipelineRun, FullQueueAtK100) {
  World w;
  w.cfg.detection.k_percent = 100;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(1));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  EXPECT_EQ(run.current().flagged_count(), run.current().collected.size());
}

TEST(PipelineRun, VerdictAndCloseGuards) {
  World w;
  w.cfg.rounds = 2;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  EXPECT_THROW(run.close_round(w.ctx), StateError);
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  EXPECT_THROW(run.ingest(run.current().seeds.begin()->second[0].id, "late", "late text"), StateError);
  EXPECT_THROW(run.close_round(w.ctx), StateError);

  const auto& r = run.current();
  std::string unflagged;
  for (const auto& [key, members] : r.collected.classes()) {
    for (const auto& u : members) {
      if (!r.is_flagged(u.id)) unflagged = u.id;
    }
  }
  EXPECT_THROW(run.record_verdict({unflagged, VerdictLabel::Error}), StateError);
  EXPECT_THROW(run.record_verdict({"missing", VerdictLabel::Error}), NotFoundError);

  const std::string first = r.flagged.begin()->second[0];
  EXPECT_TRUE(run.record_verdict({first, VerdictLabel::Error}));
  EXPECT_FALSE(run.record_verdict({first, VerdictLabel::Error}));
  EXPECT_TRUE(run.record_verdict({first, VerdictLabel::Unique}));
  EXPECT_EQ(run.current().verdicts.at(first).label, VerdictLabel::Unique);

  run.apply_synthetic_verdicts();
  EXPECT_EQ(run.current().pending_verdicts(), 0u);
  EXPECT_EQ(run.current().verdicts.at(first).source, VerdictSource::Human);
  run.close_round(w.ctx);
  EXPECT_THROW(run.close_round(w.ctx), StateError);
  run.start_next_round();
  EXPECT_EQ(run.current().round, 2);
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  run.apply_synthetic_verdicts();
  run.close_round(w.ctx);
  EXPECT_THROW(run.start_next_round(), StateError);
}

TEST(PipelineRun, SyntheticOracleLabelsNoiseAsError) {
  World w;
  w.cfg.detection.k_percent = 100;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(1));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  run.apply_synthetic_verdicts();
  const auto& r = run.current();
  std::size_t noise = 0;
  for (const auto& [id, p] : r.provenance) {
    noise += p.noise;
    EXPECT_EQ(r.verdicts.at(id).label, p.noise ? VerdictLabel::Error : VerdictLabel::Unique);
  }
  EXPECT_GT(noise, 0u);
  const auto kept = r.validated();
  for (const auto& [key, members] : kept.classes()) {
    for (const auto& u : members) EXPECT_FALSE(r.provenance.at(u.id).noise);
  }
}

TEST(PipelineRun, SameStrategyKeepsSeeds) {
  World w;
  w.cfg.strategy = Strategy::Same;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  for (int round = 1; round <= 3; ++round) {
    if (round > 1) run.start_next_round();
    EXPECT_EQ(run.current().seeds, run.rounds().front().seeds);
    run.collect_from_generator(w.gen);
    run.build_validation_queue(w.ctx);
    run.apply_synthetic_verdicts();
    run.close_round(w.ctx);
  }
}

TEST(PipelineRun, UniqueSeedsComeFromValidatedOutliersOrFallback) {
  World w;
  w.cfg.strategy = Strategy::Unique;
  w.cfg.detection.k_percent = 20;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  run.apply_synthetic_verdicts();
  run.close_round(w.ctx);
  const auto& r = run.current();
  const auto validated = r.validated();
  for (const auto& [key, sel] : r.next_seeds) {
    EXPECT_EQ(sel.seeds.size(), w.cfg.seeds_per_class);
    std::size_t from_outliers = 0;
    for (const auto& s : sel.seeds) {
      EXPECT_TRUE(validated.contains(s.id));
      if (r.is_flagged(s.id)) {
        EXPECT_EQ(r.verdicts.at(s.id).label, VerdictLabel::Unique);
        ++from_outliers;
      }
    }
    EXPECT_LE(sel.seeds.size() - from_outliers, sel.random_fallbacks);
  }
}

TEST(PipelineRun, AllErrorsFallBackToRandomWithWarning) {
  World w;
  w.cfg.strategy = Strategy::Unique;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  for (const auto& [key, ids] : run.current().flagged) {
    for (const auto& id : ids) run.record_verdict({id, VerdictLabel::Error});
  }
  run.close_round(w.ctx);
  const auto& r = run.current();
  for (const auto& [key, sel] : r.next_seeds) {
    EXPECT_EQ(sel.random_fallbacks, w.cfg.seeds_per_class);
    for (const auto& s : sel.seeds) EXPECT_FALSE(r.is_flagged(s.id));
  }
  EXPECT_EQ(r.warnings.size(), r.next_seeds.size());
}

TEST(PipelineRun, HumanDisambiguationOverrides) {
  World w;
  w.cfg.strategy = Strategy::Unique;
  w.cfg.seeds_per_class = 1;
  PipelineRun run(w.cfg);
  run.start_first_round(w.gen.initial_seeds(1));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  run.apply_synthetic_verdicts();
  const auto& r = run.current();
  std::string rejected;
  for (const auto& id : r.flagged.at("alarm")) {
    if (r.verdicts.at(id).label == VerdictLabel::Unique) {
      rejected = id;
      break;
    }
  }
  ASSERT_FALSE(rejected.empty());
  EXPECT_TRUE(run.record_disambiguation(rejected, false));
  EXPECT_FALSE(run.record_disambiguation(rejected, false));
  run.close_round(w.ctx);
  for (const auto& s : run.current().next_seeds.at("alarm").seeds) EXPECT_NE(s.id, rejected);
}

TEST(PipelineRun, ReplayReproducesState) {
  World w;
  std::vector<json> events;
  PipelineRun run(w.cfg, [&](const json& e) { events.push_back(e); });
  run.start_first_round(w.gen.initial_seeds(w.cfg.seeds_per_class));
  run.collect_from_generator(w.gen);
  run.build_validation_queue(w.ctx);
  run.record_verdict({run.current().flagged.begin()->second[0], VerdictLabel::Error});
  run.apply_synthetic_verdicts();
  run.close_round(w.ctx);
  run.start_next_round();
  run.ingest(run.current().seeds.begin()->second[0].id, "", "a human paraphrase");

  // Through the text log format.
  std::stringstream log;
  for (const auto& e : events) log << e.dump() << '\n';
  PipelineRun copy(w.cfg);
  for (std::string line; std::getline(log, line);) copy.replay(json::parse(line));
  EXPECT_EQ(copy, run);
  EXPECT_EQ(copy.final_dataset(), run.final_dataset());

  PipelineRun gap(w.cfg);
  EXPECT_THROW(gap.replay(events[1]), Error);
}

TEST(Disambiguation, StrictInequality) {
  LabeledCorpus c;
  c.add(make_utterance("a1", "x", "a"));
  c.add(make_utterance("a2", "y", "a"));
  c.add(make_utterance("b1", "z", "b"));
  EmbeddingMatrix m(1);
  const double a1[] = {0}, a2[] = {2}, b1[] = {3};
  m.append("a1", a1);
  m.append("a2", a2);
  m.append("b1", b1);
  // a2: own-mean distance 1, nearest other 1 -> tie -> drop.
  auto r = disambiguate_seed(*c.find("a2"), c, m);
  EXPECT_FALSE(r.keep);
  EXPECT_EQ(r.nearest_id, "b1");
  EXPECT_EQ(r.own_mean_distance, 1.0);
  EXPECT_TRUE(disambiguate_seed(*c.find("a1"), c, m).keep);

  // A candidate at its own class mean is kept; one identical to another class is dropped.
  LabeledCorpus d;
  d.add(make_utterance("m", "x", "a"));
  d.add(make_utterance("o", "y", "b"));
  d.add(make_utterance("t", "z", "b"));
  EmbeddingMatrix e(1);
  const double mv[] = {5}, ov[] = {5}, tv[] = {9};
  e.append("m", mv);
  e.append("o", ov);
  e.append("t", tv);
  EXPECT_FALSE(disambiguate_seed(*d.find("m"), d, e).keep);
  LabeledCorpus single;
  single.add(make_utterance("m", "x", "a"));
  EXPECT_THROW(disambiguate_seed(*single.find("m"), single, e), Error);
}

TEST(Split, ProportionsAndDegenerateClasses) {
  LabeledCorpus c;
  for (int i = 0; i < 100; ++i) c.add(make_utterance("a" + std::to_string(i), "text " + std::to_string(i), "a"));
  c.add(make_utterance("lonely", "only one", "b"));
  auto s = split_dataset(c, 0.85, 4);
  EXPECT_EQ(s.train.members("a").size(), 85u);
  EXPECT_EQ(s.test.members("a").size(), 15u);
  EXPECT_TRUE(s.train.contains("lonely"));
  EXPECT_FALSE(s.test.has_class("b"));
  EXPECT_EQ(s.warnings.size(), 1u);
  EXPECT_EQ(split_dataset(c, 0.85, 4).train, s.train);
  EXPECT_NE(split_dataset(c, 0.85, 5).train, s.train);
  EXPECT_THROW(split_dataset(c, 1.0, 4), Error);
}

TEST(Simulation, SmallRunInvariants) {
  World w;
  w.cfg.rounds = 2;
  SimulationOptions opt;
  opt.vector_dim = 16;
  auto res = run_simulation(w.cfg, w.gen_cfg, opt);
  ASSERT_EQ(res.outcomes.size(), 3u);
  for (const auto& o : res.outcomes) {
    EXPECT_EQ(o.first_round, res.outcomes[0].first_round);
    std::size_t total = 0;
    for (const auto& r : o.rounds) total += r.samples;
    EXPECT_LE(o.final_dataset.size(), total);
    for (const auto& id : o.error_ids) EXPECT_FALSE(o.final_dataset.contains(id));
  }
  EXPECT_EQ(res.coverage.size(), 9u);
  std::ostringstream table;
  write_round_table(table, res);
  EXPECT_NE(table.str().find("diversity\tround 1\tround 2\tall"), std::string::npos);
  auto again = run_simulation(w.cfg, w.gen_cfg, opt);
  EXPECT_EQ(again.outcomes[2].final_dataset, res.outcomes[2].final_dataset);
}

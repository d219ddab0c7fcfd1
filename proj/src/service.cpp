#include "outlier/service.hpp"

#include <charconv>
#include <mutex>
#include <vector>

#include "outlier/error.hpp"
#include "outlier/eval.hpp"

namespace outlier {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return parts;
}

std::size_t query_size(const Query& query, const std::string& key, std::size_t fallback) {
  auto it = query.find(key);
  if (it == query.end()) return fallback;
  std::size_t v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("query parameter '" + key + "' must be a non-negative integer");
  return v;
}

std::string require_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw Error(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<int> optional_round(const json& body) {
  auto it = body.find("round");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw Error("\"round\" must be an integer");
  return it->get<int>();
}

json error_body(const std::string& message) { return {{"error", message}}; }

json seeds_json(const std::vector<Utterance>& seeds) {
  json arr = json::array();
  for (const auto& u : seeds) arr.push_back(to_record(u));
  return arr;
}

std::optional<double> diversity_or_null(const LabeledCorpus& corpus) {
  if (corpus.empty()) return std::nullopt;
  return diversity(corpus);
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

constexpr std::size_t kDefaultPage = 50;
constexpr std::size_t kMaxPage = 1000;

}  // namespace

ReviewService::ReviewService(ProjectStore store)
    : store_(std::move(store)),
      words_(store_.word_vectors()),
      generator_(store_.generator()),
      log_(store_.events_path()) {
  ctx_.words = words_ ? &*words_ : nullptr;
  run_ = std::make_unique<PipelineRun>(store_.config().pipeline);
  replay_events(*run_, RoundLog::read(store_.events_path()));
  run_->set_sink([this](const json& event) { log_.append(event); });
  if (!run_->has_round()) run_->start_first_round(store_.seeds());
}

Response ReviewService::handle(std::string_view method, std::string_view path, const Query& query,
                               std::string_view body) {
  try {
    if (method == "GET") {
      std::shared_lock lock(mutex_);
      return get(path, query);
    }
    if (method == "POST") {
      json parsed = body.empty() ? json::object() : json::parse(body);
      if (!parsed.is_object()) throw Error("request body must be a JSON object");
      std::unique_lock lock(mutex_);
      return post(path, parsed);
    }
    return {405, error_body("method not allowed")};
  } catch (const NotFoundError& e) {
    return {404, error_body(e.what())};
  } catch (const StateError& e) {
    return {409, error_body(e.what())};
  } catch (const Error& e) {
    return {400, error_body(e.what())};
  } catch (const json::exception& e) {
    return {400, error_body(e.what())};
  } catch (const std::exception& e) {
    return {500, error_body(e.what())};
  }
}

Response ReviewService::get(std::string_view path, const Query& query) {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") throw NotFoundError("no route " + std::string(path));
  const std::string& what = parts[1];
  if (what == "classes" && parts.size() == 2) return {200, classes_json()};
  if (what == "classes" && parts.size() == 4 && parts[3] == "outliers") return {200, outliers_json(parts[2], query)};
  if (what == "rounds" && parts.size() == 2) {
    json arr = json::array();
    for (const auto& r : run_->rounds()) arr.push_back(round_json(r, false));
    return {200, arr};
  }
  if (what == "rounds" && parts.size() == 3 && parts[2] == "current") return {200, round_json(run_->current(), true)};
  if (what == "disambiguation" && parts.size() == 3) return {200, disambiguation_json(parts[2])};
  if (what == "reports" && parts.size() == 2) return {200, reports_json()};
  throw NotFoundError("no route " + std::string(path));
}

Response ReviewService::post(std::string_view path, const json& body) {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") throw NotFoundError("no route " + std::string(path));
  const std::string& what = parts[1];
  const RoundState& r = run_->current();

  if (what == "paraphrases" && parts.size() == 2) {
    std::string id;
    if (auto it = body.find("id"); it != body.end() && !it->is_null()) id = require_string(body, "id");
    const auto res = run_->ingest(require_string(body, "seed_id"), id, require_string(body, "text"));
    static constexpr const char* names[] = {"added", "duplicate", "already-present"};
    return {res.status == IngestStatus::Added ? 201 : 200,
            {{"status", names[static_cast<int>(res.status)]}, {"id", res.id}}};
  }
  if (what == "generate" && parts.size() == 2) {
    if (!generator_) throw StateError("this project has no paraphrase generator");
    if (auto round = optional_round(body); round && *round != r.round) {
      throw StateError("round " + std::to_string(*round) + " is not the current round");
    }
    run_->collect_from_generator(*generator_);
    return {200, {{"round", r.round}, {"collected", run_->current().collected.size()}}};
  }
  if (what == "queue" && parts.size() == 2) {
    if (auto round = optional_round(body); round && *round == r.round && r.phase != RoundPhase::Collecting) {
      return {200, {{"round", r.round}, {"changed", false}, {"flagged", r.flagged_count()}}};
    }
    run_->build_validation_queue(ctx_);
    return {200, {{"round", r.round}, {"changed", true}, {"flagged", run_->current().flagged_count()}}};
  }
  if (what == "verdicts" && parts.size() == 2) {
    Verdict v{require_string(body, "id"), parse_verdict_label(require_string(body, "label")), VerdictSource::Human};
    const bool changed = run_->record_verdict(v);
    return {200, {{"id", v.id}, {"label", verdict_label_name(v.label)}, {"changed", changed},
                  {"pending", run_->current().pending_verdicts()}}};
  }
  if (what == "disambiguation" && parts.size() == 2) {
    const std::string id = require_string(body, "id");
    auto it = body.find("keep");
    if (it == body.end() || !it->is_boolean()) throw Error("\"keep\" must be a boolean");
    const bool changed = run_->record_disambiguation(id, it->get<bool>());
    return {200, {{"id", id}, {"keep", it->get<bool>()}, {"changed", changed}}};
  }
  if (what == "rounds" && parts.size() == 3 && parts[2] == "close") {
    const auto round = optional_round(body);
    if (round && (*round < r.round || (*round == r.round && r.phase == RoundPhase::Closed))) {
      return {200, {{"round", *round}, {"changed", false}}};
    }
    if (r.phase == RoundPhase::Validating) {
      if (const auto pending = r.pending_verdicts(); pending > 0) {
        return {409, {{"error", std::to_string(pending) + " flagged item(s) still need a verdict"},
                      {"remaining", pending}}};
      }
    }
    run_->close_round(ctx_);
    return {200, {{"round", r.round}, {"changed", true}}};
  }
  if (what == "rounds" && parts.size() == 3 && parts[2] == "start") {
    if (auto round = optional_round(body); round && *round <= r.round) {
      return {200, {{"round", r.round}, {"changed", false}}};
    }
    run_->start_next_round();
    return {200, {{"round", run_->current().round}, {"changed", true}}};
  }
  throw NotFoundError("no route " + std::string(path));
}

json ReviewService::classes_json() const {
  const RoundState& r = run_->current();
  json arr = json::array();
  for (const auto& [key, seeds] : r.seeds) {
    std::size_t reviewed = 0, flagged = 0;
    if (auto f = r.flagged.find(key); f != r.flagged.end()) {
      flagged = f->second.size();
      for (const auto& id : f->second) reviewed += r.verdicts.count(id);
    }
    arr.push_back({{"class_key", key},
                   {"seeds", seeds.size()},
                   {"collected", r.collected.has_class(key) ? r.collected.members(key).size() : 0},
                   {"flagged", flagged},
                   {"reviewed", reviewed}});
  }
  return arr;
}

json ReviewService::outliers_json(const std::string& class_key, const Query& query) const {
  const RoundState& r = run_->current();
  if (!r.seeds.count(class_key)) throw NotFoundError("unknown class '" + class_key + "'");
  auto it = r.ranked.find(class_key);
  if (it == r.ranked.end()) throw StateError("the validation queue for round " + std::to_string(r.round) + " has not been built");
  const RankedList& list = it->second;
  const auto& flagged = r.flagged.at(class_key);
  const std::size_t offset = query_size(query, "offset", 0);
  const std::size_t limit = std::min(query_size(query, "limit", kDefaultPage), kMaxPage);

  json entries = json::array();
  for (std::size_t i = offset; i < list.entries.size() && i < offset + limit; ++i) {
    const auto& e = list.entries[i];
    const Utterance* u = r.collected.find(e.id);
    const auto& prov = r.provenance.at(e.id);
    const Utterance* seed = r.find_seed(prov.seed_id);
    auto v = r.verdicts.find(e.id);
    entries.push_back({{"rank", e.rank},
                       {"id", e.id},
                       {"text", u ? u->text : ""},
                       {"score", e.score},
                       {"flagged", i < flagged.size()},
                       {"verdict", v == r.verdicts.end() ? json(nullptr) : json(verdict_label_name(v->second.label))},
                       {"seed_id", prov.seed_id},
                       {"seed_text", seed ? seed->text : ""}});
  }
  std::size_t reviewed = 0;
  for (const auto& id : flagged) reviewed += r.verdicts.count(id);
  return {{"class_key", class_key}, {"method", list.method}, {"round", r.round},  {"total", list.size()},
          {"flagged", flagged.size()}, {"reviewed", reviewed},  {"offset", offset}, {"entries", std::move(entries)}};
}

json ReviewService::round_json(const RoundState& r, bool detail) const {
  json classes = json::object();
  for (const auto& [key, seeds] : r.seeds) {
    json c = {{"seeds", seeds_json(seeds)},
              {"collected", r.collected.has_class(key) ? r.collected.members(key).size() : 0},
              {"flagged", r.flagged.count(key) ? r.flagged.at(key).size() : 0}};
    if (auto n = r.next_seeds.find(key); n != r.next_seeds.end()) {
      c["next_seeds"] = seeds_json(n->second.seeds);
      c["random_fallbacks"] = n->second.random_fallbacks;
    }
    classes[key] = std::move(c);
  }
  json out = {{"round", r.round},
              {"rounds_total", run_->config().rounds},
              {"strategy", strategy_name(run_->config().strategy)},
              {"phase", phase_name(r.phase)},
              {"collected", r.collected.size()},
              {"flagged", r.flagged_count()},
              {"pending", r.pending_verdicts()},
              {"warnings", r.warnings}};
  if (detail) {
    out["classes"] = std::move(classes);
    json verdicts = json::array();
    for (const auto& [id, v] : r.verdicts) {
      verdicts.push_back({{"id", id}, {"label", verdict_label_name(v.label)}, {"source", verdict_source_name(v.source)}});
    }
    out["verdicts"] = std::move(verdicts);
    json judgments = json::object();
    for (const auto& [id, keep] : r.disambiguation) judgments[id] = keep;
    out["disambiguation"] = std::move(judgments);
  }
  return out;
}

json ReviewService::disambiguation_json(const std::string& id) const {
  const RoundState& r = run_->current();
  if (!r.collected.contains(id)) throw NotFoundError("unknown utterance '" + id + "'");
  auto v = r.verdicts.find(id);
  if (v == r.verdicts.end() || v->second.label != VerdictLabel::Unique) {
    throw StateError("'" + id + "' is not a validated unique outlier");
  }
  const LabeledCorpus validated = r.validated();
  if (validated.classes().size() < 2) throw StateError("disambiguation needs at least two classes");
  const auto embeddings = disambiguation_embeddings(validated, ctx_);
  const Utterance& candidate = *validated.find(id);
  const auto result = disambiguate_seed(candidate, validated, embeddings);
  auto judgment = r.disambiguation.find(id);
  return {{"candidate", to_record(candidate)},
          {"nearest", to_record(*validated.find(result.nearest_id))},
          {"own_mean_distance", result.own_mean_distance},
          {"nearest_distance", result.nearest_distance},
          {"automated_keep", result.keep},
          {"judgment", judgment == r.disambiguation.end() ? json(nullptr) : json(judgment->second)}};
}

json ReviewService::reports_json() const {
  json rounds = json::array();
  for (const auto& r : run_->rounds()) {
    const LabeledCorpus kept = r.validated();
    rounds.push_back({{"round", r.round},
                      {"phase", phase_name(r.phase)},
                      {"samples", kept.size()},
                      {"diversity", number_or_null(diversity_or_null(kept))}});
  }
  const LabeledCorpus final_set = run_->final_dataset();
  json cov = nullptr;
  if (!final_set.empty()) {
    const auto split = split_dataset(final_set, store_.config().split_ratio, run_->config().seed);
    if (!split.test.empty() && split.train.class_keys() == split.test.class_keys()) {
      cov = {{"train", split.train.size()}, {"test", split.test.size()}, {"value", coverage(split.train, split.test)}};
    }
  }
  return {{"rounds", std::move(rounds)},
          {"final", {{"samples", final_set.size()}, {"diversity", number_or_null(diversity_or_null(final_set))}}},
          {"coverage", std::move(cov)}};
}

std::map<std::string, json> ReviewService::snapshot() {
  std::vector<std::string> paths = {"/api/classes", "/api/rounds", "/api/rounds/current", "/api/reports"};
  {
    std::shared_lock lock(mutex_);
    const RoundState& r = run_->current();
    for (const auto& [key, seeds] : r.seeds) paths.push_back("/api/classes/" + key + "/outliers");
    for (const auto& [id, v] : r.verdicts) {
      if (v.label == VerdictLabel::Unique) paths.push_back("/api/disambiguation/" + id);
    }
  }
  std::map<std::string, json> out;
  const Query all{{"offset", "0"}, {"limit", std::to_string(kMaxPage)}};
  for (const auto& p : paths) {
    auto res = handle("GET", p, all);
    out[p] = {{"status", res.status}, {"body", std::move(res.body)}};
  }
  return out;
}

}  // namespace outlier

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "outlier/pipeline.hpp"
#include "outlier/round_log.hpp"
#include "outlier/store.hpp"

namespace outlier {

struct Response {
  int status = 200;
  nlohmann::json body;
};

using Query = std::map<std::string, std::string>;

/// Review-loop API over one project store, independent of the transport.
/// Reads run concurrently; writes are serialized and logged before they
/// take effect, so reopening the store reproduces the same state.
///
///   GET  /api/classes
///   GET  /api/classes/{class}/outliers?offset=&limit=
///   GET  /api/rounds
///   GET  /api/rounds/current
///   GET  /api/disambiguation/{id}
///   GET  /api/reports
///   POST /api/paraphrases      {seed_id, text, id?}
///   POST /api/generate         {round?}
///   POST /api/queue            {round?}
///   POST /api/verdicts         {id, label}
///   POST /api/disambiguation   {id, keep}
///   POST /api/rounds/close     {round?}
///   POST /api/rounds/start     {round?}
class ReviewService {
 public:
  explicit ReviewService(ProjectStore store);

  Response handle(std::string_view method, std::string_view path, const Query& query = {},
                  std::string_view body = {});

  /// Every GET route's response, keyed by path. Used to compare states.
  std::map<std::string, nlohmann::json> snapshot();

  const ProjectStore& store() const { return store_; }

 private:
  Response get(std::string_view path, const Query& query);
  Response post(std::string_view path, const nlohmann::json& body);

  nlohmann::json classes_json() const;
  nlohmann::json outliers_json(const std::string& class_key, const Query& query) const;
  nlohmann::json round_json(const RoundState& r, bool detail) const;
  nlohmann::json disambiguation_json(const std::string& id) const;
  nlohmann::json reports_json() const;

  ProjectStore store_;
  std::optional<WordVectorTable> words_;
  std::optional<ParaphraseGenerator> generator_;
  EmbeddingContext ctx_;
  RoundLog log_;
  std::unique_ptr<PipelineRun> run_;
  mutable std::shared_mutex mutex_;
};

}  // namespace outlier

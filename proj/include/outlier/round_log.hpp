#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "outlier/pipeline.hpp"

namespace outlier {

/// Append-only event log, one JSON object per line.
class RoundLog {
 public:
  explicit RoundLog(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  /// Writes and flushes one event. Throws Error when the write fails.
  void append(const nlohmann::json& event);

  /// Every event in file order; a missing file reads as empty.
  static std::vector<nlohmann::json> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Feeds recorded events to a run that has not emitted anything yet.
void replay_events(PipelineRun& run, const std::vector<nlohmann::json>& events);

}  // namespace outlier

#include "outlier/round_log.hpp"

#include <string>

#include "outlier/error.hpp"

namespace outlier {

RoundLog::RoundLog(std::filesystem::path path) : path_(std::move(path)) {
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error("cannot open event log " + path_.string());
}

void RoundLog::append(const nlohmann::json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw Error("failed to write event log " + path_.string());
}

std::vector<nlohmann::json> RoundLog::read(const std::filesystem::path& path) {
  std::vector<nlohmann::json> events;
  std::ifstream in(path, std::ios::binary);
  if (!in) return events;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    try {
      events.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return events;
}

void replay_events(PipelineRun& run, const std::vector<nlohmann::json>& events) {
  for (const auto& e : events) {
    try {
      run.replay(e);
    } catch (const nlohmann::json::exception& ex) {
      throw Error("malformed event " + e.dump() + ": " + ex.what());
    }
  }
}

}  // namespace outlier

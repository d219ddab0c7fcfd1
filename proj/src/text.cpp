#include "outlier/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "outlier/error.hpp"

namespace outlier {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void validate_slots(const Utterance& u) {
  std::vector<SlotSpan> sorted = u.slots;
  std::sort(sorted.begin(), sorted.end(),
            [](const SlotSpan& a, const SlotSpan& b) { return a.start < b.start; });
  std::size_t last_end = 0;
  for (const auto& s : sorted) {
    if (s.name.empty()) throw Error("utterance '" + u.id + "': slot with empty name");
    if (s.start >= s.end || s.end > u.tokens.size()) {
      throw Error("utterance '" + u.id + "': slot '" + s.name + "' span [" +
                  std::to_string(s.start) + "," + std::to_string(s.end) +
                  ") is outside the " + std::to_string(u.tokens.size()) + " tokens");
    }
    if (s.start < last_end) throw Error("utterance '" + u.id + "': overlapping slot spans");
    last_end = s.end;
  }
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string normalized_text(std::string_view text) {
  std::string out;
  for (const auto& t : tokenize(text)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Utterance make_utterance(std::string id, std::string text, std::string class_key,
                         std::vector<SlotSpan> slots) {
  if (id.empty()) throw Error("utterance id must not be empty");
  if (is_blank(text)) throw Error("utterance '" + id + "': empty text");
  Utterance u;
  u.tokens = tokenize(text);
  u.id = std::move(id);
  u.text = std::move(text);
  u.class_key = std::move(class_key);
  u.slots = std::move(slots);
  validate_slots(u);
  return u;
}

std::string class_key_from_slots(std::span<const SlotSpan> slots) {
  std::set<std::string> names;
  for (const auto& s : slots) names.insert(s.name);
  if (names.empty()) return "none";
  std::string key;
  for (const auto& n : names) {
    if (!key.empty()) key.push_back('+');
    key += n;
  }
  return key;
}

void LabeledCorpus::add(Utterance u) {
  if (index_.count(u.id) != 0) throw Error("duplicate utterance id '" + u.id + "'");
  auto& bucket = classes_[u.class_key];
  index_.emplace(u.id, std::make_pair(u.class_key, bucket.size()));
  bucket.push_back(std::move(u));
}

std::vector<std::string> LabeledCorpus::class_keys() const {
  std::vector<std::string> keys;
  keys.reserve(classes_.size());
  for (const auto& [k, _] : classes_) keys.push_back(k);
  return keys;
}

const std::vector<Utterance>& LabeledCorpus::members(std::string_view class_key) const {
  auto it = classes_.find(class_key);
  if (it == classes_.end()) throw Error("unknown class '" + std::string(class_key) + "'");
  return it->second;
}

bool LabeledCorpus::has_class(std::string_view class_key) const {
  return classes_.find(class_key) != classes_.end();
}

bool LabeledCorpus::contains(std::string_view id) const {
  return index_.count(std::string(id)) != 0;
}

const Utterance* LabeledCorpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return nullptr;
  const auto& [key, pos] = it->second;
  return &classes_.find(key)->second[pos];
}

nlohmann::json to_record(const Utterance& u) {
  nlohmann::json rec;
  rec["id"] = u.id;
  rec["text"] = u.text;
  rec["label"] = u.class_key;
  if (!u.slots.empty()) {
    auto slots = nlohmann::json::array();
    for (const auto& s : u.slots) {
      slots.push_back({{"name", s.name}, {"start", s.start}, {"end", s.end}});
    }
    rec["slots"] = std::move(slots);
  }
  return rec;
}

Utterance from_record(const nlohmann::json& rec) {
  if (!rec.is_object()) throw Error("record is not an object");
  auto require_string = [&](const char* key) -> std::string {
    auto it = rec.find(key);
    if (it == rec.end()) throw Error(std::string("missing \"") + key + "\" field");
    if (!it->is_string()) throw Error(std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
  };
  std::string id = require_string("id");
  std::string text = require_string("text");

  std::vector<SlotSpan> slots;
  if (auto it = rec.find("slots"); it != rec.end()) {
    if (!it->is_array()) throw Error("\"slots\" must be a list");
    for (const auto& s : *it) {
      if (!s.is_object() || !s.contains("name") || !s.contains("start") || !s.contains("end") ||
          !s["name"].is_string() || !s["start"].is_number_unsigned() ||
          !s["end"].is_number_unsigned()) {
        throw Error("slot entries need string \"name\" and non-negative \"start\"/\"end\"");
      }
      slots.push_back({s["name"].get<std::string>(), s["start"].get<std::size_t>(),
                       s["end"].get<std::size_t>()});
    }
  }

  std::string label;
  if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("\"label\" must be a string");
    label = it->get<std::string>();
  } else {
    label = class_key_from_slots(slots);
  }
  return make_utterance(std::move(id), std::move(text), std::move(label), std::move(slots));
}

LabeledCorpus read_corpus(std::istream& in, const std::string& source_name) {
  LabeledCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      corpus.add(from_record(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  return corpus;
}

LabeledCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  for (const auto& [_, members] : corpus.classes()) {
    for (const auto& u : members) out << to_record(u).dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file " + path.string());
  write_corpus(out, corpus);
}

DedupeResult dedupe(const LabeledCorpus& corpus) {
  DedupeResult result;
  for (const auto& [_, members] : corpus.classes()) {
    std::set<std::string> seen;
    for (const auto& u : members) {
      std::string norm;
      for (const auto& t : u.tokens) {
        if (!norm.empty()) norm.push_back(' ');
        norm += t;
      }
      if (seen.insert(std::move(norm)).second) {
        result.corpus.add(u);
      } else {
        ++result.removed;
      }
    }
  }
  return result;
}

}  // namespace outlier

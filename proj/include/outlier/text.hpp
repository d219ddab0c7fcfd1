#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace outlier {

using TokenList = std::vector<std::string>;

/// Lowercases and splits on every non-alphanumeric ASCII byte. Bytes >= 0x80
/// are kept as word characters so UTF-8 words survive intact.
TokenList tokenize(std::string_view text);

/// Tokens joined by single spaces. Two texts are duplicates iff this matches.
std::string normalized_text(std::string_view text);

struct SlotSpan {
  std::string name;
  std::size_t start = 0;  // token index
  std::size_t end = 0;    // exclusive

  friend bool operator==(const SlotSpan&, const SlotSpan&) = default;
};

struct Utterance {
  std::string id;
  std::string text;
  std::string class_key;
  TokenList tokens;
  std::vector<SlotSpan> slots;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Builds a validated utterance; tokens are derived from the text.
/// Throws Error on empty text or invalid slot spans.
Utterance make_utterance(std::string id, std::string text, std::string class_key,
                         std::vector<SlotSpan> slots = {});

/// Sorted, de-duplicated slot names joined by '+'; "none" for no slots.
std::string class_key_from_slots(std::span<const SlotSpan> slots);

/// Utterances grouped by class key. Class iteration order is the sorted key
/// order; within a class, insertion order is preserved.
class LabeledCorpus {
 public:
  using ClassMap = std::map<std::string, std::vector<Utterance>, std::less<>>;

  /// Throws Error on duplicate id.
  void add(Utterance u);

  const ClassMap& classes() const { return classes_; }
  std::vector<std::string> class_keys() const;
  const std::vector<Utterance>& members(std::string_view class_key) const;
  bool has_class(std::string_view class_key) const;

  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }

  bool contains(std::string_view id) const;
  /// nullptr when absent.
  const Utterance* find(std::string_view id) const;

  friend bool operator==(const LabeledCorpus& a, const LabeledCorpus& b) {
    return a.classes_ == b.classes_;
  }

 private:
  ClassMap classes_;
  // id -> (class key, position)
  std::unordered_map<std::string, std::pair<std::string, std::size_t>> index_;
};

// Corpus line format: one JSON object per line with `id`, `text`, and
// optional `label` and `slots` ([{name, start, end}]).
nlohmann::json to_record(const Utterance& u);
Utterance from_record(const nlohmann::json& record);

LabeledCorpus read_corpus(std::istream& in, const std::string& source_name = "<stream>");
LabeledCorpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const LabeledCorpus& corpus);
void save_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus);

struct DedupeResult {
  LabeledCorpus corpus;
  std::size_t removed = 0;
};

/// Drops, per class, utterances whose normalized text repeats an earlier one.
DedupeResult dedupe(const LabeledCorpus& corpus);

}  // namespace outlier

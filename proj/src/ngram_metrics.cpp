#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "outlier/error.hpp"
#include "outlier/eval.hpp"

namespace outlier {

namespace {

// Distinct n-gram ids for n = 1..max_n of one utterance, each sorted.
struct NgramProfile {
  std::size_t length = 0;
  std::vector<std::vector<std::uint32_t>> by_order;
};

class NgramInterner {
 public:
  explicit NgramInterner(int max_n) : max_n_(max_n) {}

  NgramProfile profile(std::span<const std::string> tokens) {
    NgramProfile p;
    p.length = tokens.size();
    p.by_order.resize(static_cast<std::size_t>(max_n_));
    std::string key;
    for (int n = 1; n <= max_n_; ++n) {
      auto& ids = p.by_order[static_cast<std::size_t>(n - 1)];
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        key = std::to_string(n);
        for (int j = 0; j < n; ++j) {
          key.push_back('\x1f');
          key += tokens[i + static_cast<std::size_t>(j)];
        }
        auto [it, _] = ids_.emplace(key, static_cast<std::uint32_t>(ids_.size()));
        ids.push_back(it->second);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    return p;
  }

 private:
  int max_n_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

std::size_t intersection_size(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return common;
}

double profile_distance(const NgramProfile& a, const NgramProfile& b, int max_n) {
  const std::size_t longer = std::max(a.length, b.length);
  const std::size_t orders = std::max<std::size_t>(1, std::min(static_cast<std::size_t>(max_n), longer));
  double jaccard_sum = 0.0;
  for (std::size_t n = 0; n < orders; ++n) {
    const auto& sa = a.by_order[n];
    const auto& sb = b.by_order[n];
    const std::size_t common = intersection_size(sa, sb);
    const std::size_t uni = sa.size() + sb.size() - common;
    jaccard_sum += uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
  }
  return 1.0 - jaccard_sum / static_cast<double>(orders);
}

std::vector<NgramProfile> profiles_of(NgramInterner& interner, const std::vector<Utterance>& members) {
  std::vector<NgramProfile> out;
  out.reserve(members.size());
  for (const auto& u : members) out.push_back(interner.profile(u.tokens));
  return out;
}

}  // namespace

void MetricConfig::validate() const {
  if (max_n < 1) throw Error("max n-gram length must be at least 1");
}

double pair_distance(std::span<const std::string> a, std::span<const std::string> b,
                     const MetricConfig& cfg) {
  cfg.validate();
  NgramInterner interner(cfg.max_n);
  auto pa = interner.profile(a);
  auto pb = interner.profile(b);
  return profile_distance(pa, pb, cfg.max_n);
}

double pair_distance(const Utterance& a, const Utterance& b, const MetricConfig& cfg) {
  return pair_distance(a.tokens, b.tokens, cfg);
}

double diversity(const LabeledCorpus& corpus, const MetricConfig& cfg) {
  cfg.validate();
  if (corpus.classes().empty()) throw Error("diversity of a corpus without classes");
  double total = 0.0;
  for (const auto& [key, members] : corpus.classes()) {
    if (members.empty()) throw Error("class '" + key + "' is empty");
    NgramInterner interner(cfg.max_n);
    auto profiles = profiles_of(interner, members);
    double sum = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      for (std::size_t j = i + 1; j < profiles.size(); ++j) {
        sum += profile_distance(profiles[i], profiles[j], cfg.max_n);
      }
    }
    const double n = static_cast<double>(members.size());
    // Ordered pairs: each unordered pair twice, self-pairs contribute 0.
    total += 2.0 * sum / (n * n);
  }
  return total / static_cast<double>(corpus.classes().size());
}

double coverage(const LabeledCorpus& train, const LabeledCorpus& test, const MetricConfig& cfg) {
  cfg.validate();
  if (train.class_keys() != test.class_keys()) throw Error("coverage: train and test class sets differ");
  if (test.classes().empty()) throw Error("coverage of a corpus without classes");
  double total = 0.0;
  for (const auto& [key, test_members] : test.classes()) {
    const auto& train_members = train.members(key);
    if (test_members.empty() || train_members.empty()) throw Error("class '" + key + "' is empty");
    NgramInterner interner(cfg.max_n);
    auto train_profiles = profiles_of(interner, train_members);
    double sum = 0.0;
    for (const auto& b : test_members) {
      auto pb = interner.profile(b.tokens);
      double best = 0.0;
      for (const auto& pa : train_profiles) {
        best = std::max(best, 1.0 - profile_distance(pa, pb, cfg.max_n));
        if (best == 1.0) break;
      }
      sum += best;
    }
    total += sum / static_cast<double>(test_members.size());
  }
  return total / static_cast<double>(test.classes().size());
}

}  // namespace outlier

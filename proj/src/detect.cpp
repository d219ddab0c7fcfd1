#include "outlier/detect.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include "outlier/error.hpp"
#include "outlier/rng.hpp"

namespace outlier {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::Average, "average"}, {Method::Sif, "sif"},     {Method::Precomputed, "precomputed"},
    {Method::Bow, "bow"},         {Method::Random, "random"}, {Method::Short, "short"},
    {Method::Long, "long"},
};

// Sorts by score descending, ties by id ascending, and assigns ranks.
void finalize(RankedList& list) {
  std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < list.entries.size(); ++i) list.entries[i].rank = i + 1;
}

std::vector<std::string> ids_of(std::span<const Utterance> utterances) {
  std::vector<std::string> ids;
  ids.reserve(utterances.size());
  for (const auto& u : utterances) ids.push_back(u.id);
  return ids;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  throw Error("unknown method '" + std::string(name) + "'");
}

std::string RankerSpec::name() const {
  if (methods.size() == 1) return std::string(method_name(methods.front()));
  std::string out = "borda:";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i > 0) out.push_back('+');
    out += method_name(methods[i]);
  }
  return out;
}

RankerSpec RankerSpec::parse(std::string_view text) {
  RankerSpec spec;
  constexpr std::string_view prefix = "borda:";
  if (text.substr(0, prefix.size()) == prefix) {
    std::string_view rest = text.substr(prefix.size());
    while (!rest.empty()) {
      auto plus = rest.find('+');
      spec.methods.push_back(parse_method(rest.substr(0, plus)));
      if (plus == std::string_view::npos) break;
      rest = rest.substr(plus + 1);
    }
    if (spec.methods.size() < 2) throw Error("borda needs at least two methods: '" + std::string(text) + "'");
  } else {
    spec.methods.push_back(parse_method(text));
  }
  return spec;
}

bool RankerSpec::needs_word_vectors() const {
  return std::any_of(methods.begin(), methods.end(),
                     [](Method m) { return m == Method::Average || m == Method::Sif; });
}

bool RankerSpec::needs_precomputed() const {
  return std::find(methods.begin(), methods.end(), Method::Precomputed) != methods.end();
}

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

void DetectionConfig::validate() const {
  if (ranker.methods.empty()) throw Error("detection needs at least one method");
  if (!(k_percent >= 0.0 && k_percent <= 100.0)) throw Error("k_percent must lie in [0, 100]");
}

Vector class_mean(const EmbeddingMatrix& m) {
  if (m.empty()) throw Error("class_mean of an empty matrix");
  Vector mean(m.dim(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
  }
  for (double& x : mean) x /= static_cast<double>(m.rows());
  return mean;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

RankedList rank_by_distance(const EmbeddingMatrix& m, std::string class_key, std::string method) {
  Vector mean = class_mean(m);
  RankedList list{std::move(class_key), std::move(method), {}};
  list.entries.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    list.entries.push_back({m.ids()[r], euclidean_distance(m.row(r), mean), 0});
  }
  finalize(list);
  return list;
}

RankedList rank_baseline(std::span<const Utterance> utterances, Method method, std::uint64_t seed,
                         std::string class_key) {
  if (utterances.empty()) throw Error("cannot rank an empty class");
  RankedList list{std::move(class_key), std::string(method_name(method)), {}};
  switch (method) {
    case Method::Random: {
      // Shuffle from a canonical order so the result ignores input order.
      std::vector<std::string> ids = ids_of(utterances);
      std::sort(ids.begin(), ids.end());
      Rng rng(seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      const double n = static_cast<double>(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        list.entries.push_back({ids[i], n - static_cast<double>(i), 0});
      }
      break;
    }
    case Method::Short: {
      std::size_t longest = 0;
      for (const auto& u : utterances) longest = std::max(longest, u.tokens.size());
      for (const auto& u : utterances) {
        list.entries.push_back({u.id, static_cast<double>(longest - u.tokens.size()), 0});
      }
      break;
    }
    case Method::Long:
      for (const auto& u : utterances) {
        list.entries.push_back({u.id, static_cast<double>(u.tokens.size()), 0});
      }
      break;
    default:
      throw Error("'" + std::string(method_name(method)) + "' is not a baseline method");
  }
  finalize(list);
  return list;
}

RankedList borda_merge(std::span<const RankedList> lists) {
  if (lists.empty()) throw Error("borda_merge needs at least one list");
  const auto reference = [&] {
    auto ids = lists.front().ids();
    std::sort(ids.begin(), ids.end());
    return ids;
  }();
  std::unordered_map<std::string, double> points;
  for (const auto& list : lists) {
    auto ids = list.ids();
    std::sort(ids.begin(), ids.end());
    if (ids != reference) {
      throw Error("borda_merge: list '" + list.method + "' ranks a different id set than '" +
                  lists.front().method + "'");
    }
    const std::size_t n = list.entries.size();
    for (std::size_t pos = 1; pos <= n; ++pos) {
      points[list.entries[pos - 1].id] += static_cast<double>(n - pos);
    }
  }
  RankedList merged;
  merged.class_key = lists.front().class_key;
  if (lists.size() == 1) {
    merged.method = lists.front().method;
  } else {
    merged.method = "borda:";
    for (std::size_t i = 0; i < lists.size(); ++i) {
      if (i > 0) merged.method.push_back('+');
      merged.method += lists[i].method;
    }
  }
  for (const auto& id : reference) merged.entries.push_back({id, points[id], 0});
  finalize(merged);
  return merged;
}

std::size_t cutoff_count(std::size_t n, double k_percent) {
  if (k_percent <= 0.0) return 0;
  // The epsilon absorbs rounding in n * k so exact products do not round up.
  double r = std::ceil(static_cast<double>(n) * k_percent / 100.0 - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, r)));
}

std::vector<std::string> flag_top_k(const RankedList& list, double k_percent) {
  if (!(k_percent >= 0.0 && k_percent <= 100.0)) throw Error("k_percent must lie in [0, 100]");
  std::size_t r = cutoff_count(list.size(), k_percent);
  std::vector<std::string> ids;
  ids.reserve(r);
  for (std::size_t i = 0; i < r; ++i) ids.push_back(list.entries[i].id);
  return ids;
}

RankedList rank_class(std::span<const Utterance> utterances, const std::string& class_key,
                      Method method, const EmbeddingContext& ctx, std::uint64_t seed) {
  if (utterances.empty()) throw Error("cannot rank an empty class");
  const std::string name(method_name(method));
  switch (method) {
    case Method::Average:
      if (ctx.words == nullptr) throw Error("method 'average' needs word vectors");
      return rank_by_distance(embed_average(utterances, *ctx.words), class_key, name);
    case Method::Sif: {
      if (ctx.words == nullptr) throw Error("method 'sif' needs word vectors");
      if (ctx.frequencies != nullptr) {
        return rank_by_distance(embed_sif(utterances, *ctx.words, *ctx.frequencies, ctx.sif),
                                class_key, name);
      }
      FrequencyTable local;
      for (const auto& u : utterances) {
        for (const auto& t : u.tokens) local.add(t);
      }
      return rank_by_distance(embed_sif(utterances, *ctx.words, local, ctx.sif), class_key, name);
    }
    case Method::Precomputed: {
      if (ctx.precomputed == nullptr) throw Error("method 'precomputed' needs a vector file");
      auto ids = ids_of(utterances);
      return rank_by_distance(select_rows(*ctx.precomputed, ids).matrix, class_key, name);
    }
    case Method::Bow:
      return rank_by_distance(embed_bow(utterances), class_key, name);
    case Method::Random:
    case Method::Short:
    case Method::Long:
      return rank_baseline(utterances, method, derive_seed(seed, class_key), class_key);
  }
  throw Error("unhandled method");
}

RankedList rank_class(std::span<const Utterance> utterances, const std::string& class_key,
                      const RankerSpec& ranker, const EmbeddingContext& ctx, std::uint64_t seed) {
  if (ranker.methods.empty()) throw Error("ranker has no methods");
  if (ranker.methods.size() == 1) return rank_class(utterances, class_key, ranker.methods[0], ctx, seed);
  std::vector<RankedList> lists;
  for (Method m : ranker.methods) lists.push_back(rank_class(utterances, class_key, m, ctx, seed));
  return borda_merge(lists);
}

std::map<std::string, RankedList> detect_all_classes(const LabeledCorpus& corpus,
                                                     const EmbeddingContext& ctx,
                                                     const DetectionConfig& cfg) {
  cfg.validate();
  EmbeddingContext effective = ctx;
  FrequencyTable corpus_freq;
  if (effective.frequencies == nullptr &&
      std::find(cfg.ranker.methods.begin(), cfg.ranker.methods.end(), Method::Sif) !=
          cfg.ranker.methods.end()) {
    corpus_freq = count_frequencies(corpus);
    effective.frequencies = &corpus_freq;
  }
  std::map<std::string, RankedList> out;
  for (const auto& [key, members] : corpus.classes()) {
    try {
      out.emplace(key, rank_class(members, key, cfg.ranker, effective, cfg.seed));
    } catch (const Error& e) {
      throw Error("class '" + key + "': " + e.what());
    }
  }
  return out;
}

void write_ranked_list(std::ostream& out, const RankedList& list) {
  for (const auto& e : list.entries) {
    nlohmann::json rec{{"class_key", list.class_key},
                       {"rank", e.rank},
                       {"id", e.id},
                       {"score", e.score},
                       {"method", list.method}};
    out << rec.dump() << '\n';
  }
}

std::map<std::string, RankedList> read_ranked_lists(std::istream& in, const std::string& source_name) {
  std::map<std::string, RankedList> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      auto key = rec.at("class_key").get<std::string>();
      auto& list = lists[key];
      list.class_key = key;
      list.method = rec.at("method").get<std::string>();
      list.entries.push_back(
          {rec.at("id").get<std::string>(), rec.at("score").get<double>(), rec.at("rank").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  for (auto& [key, list] : lists) {
    std::sort(list.entries.begin(), list.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      if (list.entries[i].rank != i + 1) {
        throw Error(source_name + ": ranks of class '" + key + "' are not 1..n");
      }
    }
  }
  return lists;
}

}  // namespace outlier

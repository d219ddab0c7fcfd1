#include "outlier/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "outlier/error.hpp"
#include "outlier/rng.hpp"
#include "outlier/synth.hpp"

namespace outlier {

namespace {

constexpr const char* kSkeletons[] = {
    "_ _",
    "can you _ the _",
    "i want to _ my _",
    "please _ _ now",
    "how do i _ a _",
    "show me the _ _",
    "what is the _ for _",
    "i need _ _ today",
    "could you _ _ for me",
    "_ my _ please",
};

constexpr const char* kClassNames[] = {"alarm",  "weather", "music",    "timer",  "recipe",
                                       "travel", "news",    "sports",   "shopping", "reminder"};

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

bool coin(Rng& rng, double p) {
  return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng);
}

// Garbled tokens always contain a 'q', which no generated vocabulary word has.
std::string garbled(Rng& rng) {
  static constexpr std::string_view letters = "qxjwyhcaeiou";
  std::uniform_int_distribution<std::size_t> words(2, 5), len(3, 6), letter(0, letters.size() - 1);
  std::vector<std::string> out(words(rng));
  for (auto& w : out) {
    w.push_back('q');
    for (std::size_t i = 1, n = len(rng); i < n; ++i) w.push_back(letters[letter(rng)]);
  }
  return join(out);
}

std::string fill_template(const std::string& tmpl, const auto& slot) {
  auto words = split_words(tmpl);
  for (auto& w : words) {
    if (w == "_") w = slot();
  }
  return join(words);
}

}  // namespace

void GeneratorConfig::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(fringe_adoption) || !rate_ok(base_fringe_rate) || !rate_ok(seed_reuse) ||
      !rate_ok(noise_rate)) {
    throw Error("generator rates must lie in [0, 1]");
  }
  if (classes.empty()) throw Error("generator has no classes");
  std::set<std::string> keys;
  for (const auto& g : classes) {
    if (!keys.insert(g.class_key).second) throw Error("duplicate generator class '" + g.class_key + "'");
    if (g.templates.empty()) throw Error("class '" + g.class_key + "' has no templates");
    if (g.core.empty()) throw Error("class '" + g.class_key + "' has no core vocabulary");
  }
}

const ClassGrammar& GeneratorConfig::grammar(const std::string& class_key) const {
  for (const auto& g : classes) {
    if (g.class_key == class_key) return g;
  }
  throw NotFoundError("generator has no class '" + class_key + "'");
}

GeneratorConfig default_generator_config(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  // The vocabulary is fixed; only the paraphrase draws depend on `seed`.
  Rng rng(20190601);
  std::set<std::string> used;
  for (const char* skeleton : kSkeletons) {
    for (const auto& w : split_words(skeleton)) used.insert(w);
  }
  auto fresh = [&] {
    std::uniform_int_distribution<std::size_t> syllables(2, 3);
    for (;;) {
      std::string w = pseudo_word(rng, syllables(rng));
      if (used.insert(w).second) return w;
    }
  };
  const std::size_t n_skeletons = std::size(kSkeletons);
  for (std::size_t c = 0; c < std::size(kClassNames); ++c) {
    ClassGrammar g;
    g.class_key = kClassNames[c];
    for (std::size_t j = 0; j < 6; ++j) g.templates.emplace_back(kSkeletons[(c + 3 * j) % n_skeletons]);
    for (int i = 0; i < 10; ++i) g.core.push_back(fresh());
    for (int i = 0; i < 40; ++i) g.fringe.push_back(fresh());
    cfg.classes.push_back(std::move(g));
  }
  return cfg;
}

ParaphraseGenerator::ParaphraseGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

std::vector<GeneratedParaphrase> ParaphraseGenerator::paraphrase(const Utterance& seed,
                                                                 std::size_t count,
                                                                 std::uint64_t stream) const {
  const ClassGrammar& g = cfg_.grammar(seed.class_key);
  const std::set<std::string> core(g.core.begin(), g.core.end());
  const std::set<std::string> fringe(g.fringe.begin(), g.fringe.end());

  std::vector<std::string> content;
  std::size_t fringe_hits = 0;
  for (const auto& t : seed.tokens) {
    if (core.count(t) || fringe.count(t)) {
      content.push_back(t);
      fringe_hits += fringe.count(t);
    }
  }
  const double fringe_share =
      content.empty() ? 0.0 : static_cast<double>(fringe_hits) / static_cast<double>(content.size());
  const double fringe_rate = std::min(1.0, cfg_.base_fringe_rate + cfg_.fringe_adoption * fringe_share);

  Rng rng(derive_seed(derive_seed(cfg_.seed, seed.class_key + '\x1f' + seed.text), stream));
  auto draw = [&]() -> std::string {
    if (!g.fringe.empty() && coin(rng, fringe_rate)) return pick(rng, g.fringe);
    return pick(rng, g.core);
  };
  auto slot = [&]() -> std::string {
    if (!content.empty() && coin(rng, cfg_.seed_reuse)) return pick(rng, content);
    return draw();
  };

  std::vector<GeneratedParaphrase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (coin(rng, cfg_.noise_rate)) {
      if (cfg_.classes.size() > 1 && coin(rng, 0.5)) {
        const ClassGrammar* other = &g;
        while (other->class_key == g.class_key) other = &pick(rng, cfg_.classes);
        out.push_back({fill_template(pick(rng, other->templates), [&] { return pick(rng, other->core); }),
                       true});
      } else {
        out.push_back({garbled(rng), true});
      }
      continue;
    }
    if (!seed.tokens.empty() && coin(rng, cfg_.seed_reuse)) {
      // Keep the seed's word order, swapping some of its class words.
      std::vector<std::string> words = seed.tokens;
      for (auto& w : words) {
        if ((core.count(w) || fringe.count(w)) && coin(rng, 0.5)) w = draw();
      }
      out.push_back({join(words), false});
    } else {
      out.push_back({fill_template(pick(rng, g.templates), slot), false});
    }
  }
  return out;
}

LabeledCorpus ParaphraseGenerator::initial_seeds(std::size_t per_class) const {
  LabeledCorpus seeds;
  for (const auto& g : cfg_.classes) {
    Rng rng(derive_seed(cfg_.seed, "initial-seeds/" + g.class_key));
    std::set<std::string> texts;
    for (std::size_t i = 0, attempts = 0; i < per_class; ++attempts) {
      const auto& tmpl = g.templates[(i + attempts / 4) % g.templates.size()];
      std::string text = fill_template(tmpl, [&] { return pick(rng, g.core); });
      if (!texts.insert(text).second && attempts < 64 * per_class) continue;
      seeds.add(make_utterance("seed-" + g.class_key + "-" + std::to_string(i), std::move(text), g.class_key));
      ++i;
    }
  }
  return seeds;
}

WordVectorTable ParaphraseGenerator::word_vectors(std::size_t dim) const {
  Rng rng(derive_seed(cfg_.seed, "word-vectors"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&](double norm_target) {
    Vector v(dim);
    double n2 = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      n2 += x * x;
    }
    for (double& x : v) x *= norm_target / std::sqrt(n2);
    return v;
  };
  auto offset = [](Vector base, double scale, const Vector& delta) {
    for (std::size_t j = 0; j < base.size(); ++j) base[j] = scale * base[j] + delta[j];
    return base;
  };

  WordVectorTable table(dim, "generator");
  std::set<std::string> template_words;
  for (const auto& g : cfg_.classes) {
    for (const auto& t : g.templates) {
      for (const auto& w : split_words(t)) {
        if (w != "_") template_words.insert(w);
      }
    }
  }
  for (const auto& w : template_words) table.insert(w, random_vector(0.25));
  for (const auto& g : cfg_.classes) {
    Vector centroid = random_vector(1.0);
    for (const auto& w : g.core) table.insert(w, offset(centroid, 1.0, random_vector(0.3)));
    for (const auto& w : g.fringe) table.insert(w, offset(centroid, 0.9, random_vector(0.8)));
  }
  return table;
}

}  // namespace outlier

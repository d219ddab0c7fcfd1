#include "outlier/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "outlier/error.hpp"

namespace outlier {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

// y = X^T (X v)
Vector gram_apply(const EmbeddingMatrix& m, std::span<const double> v) {
  Vector y(m.dim(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double proj = dot(row, v);
    for (std::size_t j = 0; j < m.dim(); ++j) y[j] += proj * row[j];
  }
  return y;
}

}  // namespace

WordVectorTable::WordVectorTable(std::size_t dim, std::string source)
    : dim_(dim), source_(std::move(source)) {
  if (dim == 0) throw Error("word vector dimension must be positive");
}

bool WordVectorTable::insert(std::string word, Vector v) {
  if (v.size() != dim_) {
    throw Error("vector for '" + word + "' has " + std::to_string(v.size()) +
                " components, expected " + std::to_string(dim_));
  }
  if (vectors_.count(word) != 0) {
    ++duplicates_;
    return false;
  }
  vectors_.emplace(std::move(word), std::move(v));
  return true;
}

const Vector* WordVectorTable::find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

WordVectorTable read_word_vectors(std::istream& in, std::optional<std::size_t> expected_dim,
                                  const std::string& source_name) {
  std::optional<WordVectorTable> table;
  if (expected_dim) table.emplace(*expected_dim, source_name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(source_name, line_no, "expected a word followed by numbers");
    std::size_t dim = fields.size() - 1;
    if (!table) table.emplace(dim, source_name);
    if (dim != table->dim()) {
      throw ParseError(source_name, line_no,
                       "dimension " + std::to_string(dim) + " does not match " +
                           std::to_string(table->dim()));
    }
    Vector v(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_double(fields[j + 1], v[j])) {
        throw ParseError(source_name, line_no, "cannot parse number '" + std::string(fields[j + 1]) + "'");
      }
    }
    table->insert(std::string(fields[0]), std::move(v));
  }
  if (!table) throw Error(source_name + ": no word vectors found");
  return std::move(*table);
}

WordVectorTable load_word_vectors(const std::filesystem::path& path,
                                  std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vector file " + path.string());
  return read_word_vectors(in, expected_dim, path.string());
}

void write_word_vectors(std::ostream& out, const WordVectorTable& table,
                        std::span<const std::string> order) {
  std::ostringstream line;
  line.precision(17);
  for (const auto& w : order) {
    const Vector* v = table.find(w);
    if (v == nullptr) continue;
    line.str({});
    line << w;
    for (double x : *v) line << ' ' << x;
    out << line.str() << '\n';
  }
}

void FrequencyTable::add(std::string_view token, std::size_t count) {
  counts_[std::string(token)] += count;
  total_ += count;
}

std::size_t FrequencyTable::count(std::string_view token) const {
  auto it = counts_.find(std::string(token));
  return it == counts_.end() ? 0 : it->second;
}

double FrequencyTable::probability(std::string_view token) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(token)) / static_cast<double>(total_);
}

FrequencyTable count_frequencies(const LabeledCorpus& corpus) {
  if (corpus.empty()) throw Error("cannot count frequencies of an empty corpus");
  FrequencyTable freq;
  for (const auto& [_, members] : corpus.classes()) {
    for (const auto& u : members) {
      for (const auto& t : u.tokens) freq.add(t);
    }
  }
  return freq;
}

void SifConfig::validate() const {
  if (!(a > 0.0)) throw Error("SIF parameter a must be positive");
  if (power_iterations < 1) throw Error("power_iterations must be at least 1");
  if (!(power_tolerance >= 0.0)) throw Error("power_tolerance must be non-negative");
}

void EmbeddingMatrix::append(std::string id, std::span<const double> row) {
  if (ids_.empty() && dim_ == 0) dim_ = row.size();
  if (row.size() != dim_) {
    throw Error("row '" + id + "' has " + std::to_string(row.size()) + " components, expected " +
                std::to_string(dim_));
  }
  if (index_.count(id) != 0) throw Error("duplicate embedding id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), row.begin(), row.end());
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AverageEmbedding embed_average(std::span<const std::string> tokens, const WordVectorTable& table) {
  AverageEmbedding out{Vector(table.dim(), 0.0), 0};
  std::size_t found = 0;
  for (const auto& t : tokens) {
    const Vector* v = table.find(t);
    if (v == nullptr) {
      ++out.oov_count;
      continue;
    }
    ++found;
    for (std::size_t j = 0; j < v->size(); ++j) out.vector[j] += (*v)[j];
  }
  if (found > 0) {
    for (double& x : out.vector) x /= static_cast<double>(found);
  }
  return out;
}

EmbeddingMatrix embed_average(std::span<const Utterance> utterances, const WordVectorTable& table) {
  EmbeddingMatrix m(table.dim());
  for (const auto& u : utterances) m.append(u.id, embed_average(u.tokens, table).vector);
  return m;
}

double sif_weight(std::string_view token, const FrequencyTable& freq, double a) {
  return a / (a + freq.probability(token));
}

EmbeddingMatrix embed_sif(std::span<const Utterance> utterances, const WordVectorTable& table,
                          const FrequencyTable& freq, const SifConfig& cfg) {
  cfg.validate();
  EmbeddingMatrix m(table.dim());
  bool any_in_vocab = false;
  Vector row(table.dim());
  for (const auto& u : utterances) {
    std::fill(row.begin(), row.end(), 0.0);
    std::size_t found = 0;
    double weight_sum = 0.0;
    for (const auto& t : u.tokens) {
      const Vector* v = table.find(t);
      if (v == nullptr) continue;
      double w = sif_weight(t, freq, cfg.a);
      ++found;
      weight_sum += w;
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += w * (*v)[j];
    }
    if (found > 0) {
      any_in_vocab = true;
      double denom = cfg.normalization == SifNormalization::TokenCount ? static_cast<double>(found)
                                                                       : weight_sum;
      for (double& x : row) x /= denom;
    }
    m.append(u.id, row);
  }
  if (!any_in_vocab) throw Error("SIF embedding: every utterance is out of vocabulary");
  if (cfg.remove_common_component) {
    return remove_common_component(m, cfg.power_iterations, cfg.power_tolerance);
  }
  return m;
}

std::optional<Vector> dominant_direction(const EmbeddingMatrix& m, int iterations, double tolerance) {
  const std::size_t d = m.dim();
  if (m.rows() == 0 || d == 0) return std::nullopt;
  double frob2 = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) frob2 += dot(m.row(r), m.row(r));
  if (frob2 == 0.0) return std::nullopt;
  // ||X^T X v|| is at most frob2; below this it is rounding noise.
  const double degenerate = 1e-12 * frob2;

  // Starting vectors: all-ones, then e_0, e_1, ...
  Vector v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  Vector w = gram_apply(m, v);
  for (std::size_t basis = 0; norm(w) <= degenerate && basis < d; ++basis) {
    std::fill(v.begin(), v.end(), 0.0);
    v[basis] = 1.0;
    w = gram_apply(m, v);
  }
  double wn = norm(w);
  if (wn <= degenerate) return std::nullopt;

  for (int it = 0; it < iterations; ++it) {
    Vector next(d);
    for (std::size_t j = 0; j < d; ++j) next[j] = w[j] / wn;
    double delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) delta += (next[j] - v[j]) * (next[j] - v[j]);
    v = std::move(next);
    if (std::sqrt(delta) < tolerance) break;
    w = gram_apply(m, v);
    wn = norm(w);
    if (wn <= degenerate) break;
  }
  return v;
}

EmbeddingMatrix remove_common_component(const EmbeddingMatrix& m, int iterations, double tolerance) {
  auto u = dominant_direction(m, iterations, tolerance);
  if (!u) return m;
  EmbeddingMatrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double proj = dot(row, *u);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] -= proj * (*u)[j];
  }
  return out;
}

EmbeddingMatrix read_precomputed(std::istream& in, const std::string& source_name) {
  EmbeddingMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
        throw Error("missing string \"id\" field");
      }
      if (!rec.contains("vector") || !rec["vector"].is_array() || rec["vector"].empty()) {
        throw Error("missing non-empty \"vector\" list");
      }
      Vector v;
      for (const auto& x : rec["vector"]) {
        if (!x.is_number()) throw Error("\"vector\" must contain only numbers");
        v.push_back(x.get<double>());
      }
      m.append(rec["id"].get<std::string>(), v);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  return m;
}

EmbeddingMatrix load_precomputed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open precomputed vector file " + path.string());
  return read_precomputed(in, path.string());
}

RowSelection select_rows(const EmbeddingMatrix& source, std::span<const std::string> ids) {
  RowSelection sel{EmbeddingMatrix(source.dim()), {}};
  std::vector<bool> used(source.rows(), false);
  for (const auto& id : ids) {
    auto idx = source.index_of(id);
    if (!idx) throw Error("no precomputed vector for utterance '" + id + "'");
    used[*idx] = true;
    sel.matrix.append(id, source.row(*idx));
  }
  for (std::size_t i = 0; i < source.rows(); ++i) {
    if (!used[i]) sel.unused_ids.push_back(source.ids()[i]);
  }
  return sel;
}

EmbeddingMatrix embed_bow(std::span<const Utterance> utterances) {
  std::map<std::string, std::size_t> vocab;
  for (const auto& u : utterances) {
    for (const auto& t : u.tokens) vocab.emplace(t, 0);
  }
  std::size_t col = 0;
  for (auto& [_, idx] : vocab) idx = col++;

  EmbeddingMatrix m(vocab.size());
  Vector row(vocab.size());
  for (const auto& u : utterances) {
    std::fill(row.begin(), row.end(), 0.0);
    for (const auto& t : u.tokens) row[vocab.at(t)] += 1.0;
    m.append(u.id, row);
  }
  return m;
}

}  // namespace outlier

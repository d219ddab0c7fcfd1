#include "outlier/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "outlier/error.hpp"
#include "outlier/rng.hpp"

namespace outlier {

namespace {

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void check_errors(const std::set<std::string>& errors) {
  if (errors.empty()) throw Error("error set is empty");
}

}  // namespace

void InjectionConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw Error("injection rate p must lie in (0, 1)");
}

std::size_t injection_count(std::size_t class_size, double p) {
  auto n = static_cast<std::size_t>(std::llround(p * static_cast<double>(class_size)));
  return std::max<std::size_t>(1, n);
}

InjectionResult inject_errors(const LabeledCorpus& corpus, const InjectionConfig& cfg) {
  cfg.validate();
  if (corpus.classes().size() < 2) throw Error("error injection needs at least two classes");
  for (const auto& [key, members] : corpus.classes()) {
    if (members.empty()) throw Error("class '" + key + "' is empty");
  }

  InjectionResult result{corpus, {}};
  for (const auto& [key, members] : corpus.classes()) {
    std::vector<const Utterance*> pool;
    for (const auto& [other, other_members] : corpus.classes()) {
      if (other == key) continue;
      for (const auto& u : other_members) pool.push_back(&u);
    }
    const std::size_t count = std::min(injection_count(members.size(), cfg.p), pool.size());
    Rng rng(derive_seed(cfg.seed, key));
    // Partial Fisher-Yates: the first `count` slots become the sample.
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    auto& errors = result.truth[key];
    for (std::size_t i = 0; i < count; ++i) {
      const Utterance& src = *pool[i];
      std::string id = "inj:" + key + ":" + std::to_string(i) + ":" + src.id;
      while (result.corpus.contains(id)) id.push_back('\'');
      Utterance clone = src;
      clone.id = id;
      clone.class_key = key;
      result.corpus.add(std::move(clone));
      errors.insert(id);
    }
  }
  return result;
}

ErrorGroundTruth read_ground_truth(std::istream& in, const LabeledCorpus& corpus,
                                   const std::string& source_name) {
  ErrorGroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    try {
      id = nlohmann::json::parse(line).at("id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    const Utterance* u = corpus.find(id);
    if (u == nullptr) throw ParseError(source_name, line_no, "unknown utterance id '" + id + "'");
    truth[u->class_key].insert(id);
  }
  return truth;
}

double average_precision(const RankedList& list, const std::set<std::string>& errors) {
  check_errors(errors);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (errors.count(list.entries[i].id) != 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  if (hits != errors.size()) throw Error("error ids missing from ranked list of '" + list.class_key + "'");
  return sum / static_cast<double>(errors.size());
}

double recall_at_k(const RankedList& list, const std::set<std::string>& errors, double k_percent) {
  check_errors(errors);
  const std::size_t r = cutoff_count(list.size(), k_percent);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < r; ++i) hits += errors.count(list.entries[i].id);
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

std::vector<CurvePoint> recall_curve(const RankedList& list, const std::set<std::string>& errors,
                                     int step_percent) {
  if (step_percent <= 0 || 100 % step_percent != 0) throw Error("curve step must divide 100");
  std::vector<CurvePoint> curve;
  for (int k = 0; k <= 100; k += step_percent) {
    curve.push_back({static_cast<double>(k), recall_at_k(list, errors, k)});
  }
  return curve;
}

double EvalReport::recall_at(double k_percent) const {
  for (const auto& p : recall_curve) {
    if (p.k_percent == k_percent) return p.recall;
  }
  throw Error("recall curve has no point at k=" + fixed(k_percent, 2));
}

EvalReport mean_average_precision(const std::map<std::string, RankedList>& lists,
                                  const ErrorGroundTruth& truth, int curve_step_percent) {
  EvalReport report;
  std::vector<std::vector<CurvePoint>> curves;
  double sum = 0.0;
  for (const auto& [key, list] : lists) {
    if (report.method.empty()) report.method = list.method;
    auto it = truth.find(key);
    if (it == truth.end() || it->second.empty()) {
      report.excluded_classes.push_back(key);
      continue;
    }
    double ap = average_precision(list, it->second);
    report.per_class_ap.emplace(key, ap);
    sum += ap;
    curves.push_back(recall_curve(list, it->second, curve_step_percent));
  }
  if (report.per_class_ap.empty()) throw Error("no class has any labeled error");
  report.map = sum / static_cast<double>(report.per_class_ap.size());
  report.recall_curve = curves.front();
  for (std::size_t i = 0; i < report.recall_curve.size(); ++i) {
    double total = 0.0;
    for (const auto& c : curves) total += c[i].recall;
    report.recall_curve[i].recall = total / static_cast<double>(curves.size());
  }
  return report;
}

BenchmarkResult run_benchmark(const LabeledCorpus& corpus, const ErrorGroundTruth& truth,
                              std::span<const RankerSpec> rankers, const EmbeddingContext& ctx,
                              const DetectionConfig& cfg, int curve_step_percent) {
  BenchmarkResult result;
  result.k_percent = cfg.k_percent;
  for (const auto& ranker : rankers) {
    DetectionConfig run_cfg = cfg;
    run_cfg.ranker = ranker;
    auto lists = detect_all_classes(corpus, ctx, run_cfg);
    EvalReport report = mean_average_precision(lists, truth, curve_step_percent);

    BenchmarkRow row{ranker.name(), report.map, 0.0, report.per_class_ap};
    double recall_sum = 0.0;
    for (const auto& [key, ap] : report.per_class_ap) {
      recall_sum += recall_at_k(lists.at(key), truth.at(key), cfg.k_percent);
    }
    row.recall_at_k = recall_sum / static_cast<double>(report.per_class_ap.size());
    result.curves[row.method] = std::move(report.recall_curve);
    result.rows.push_back(std::move(row));
  }
  return result;
}

BenchmarkResult run_benchmark(const LabeledCorpus& corpus, const InjectionConfig& injection,
                              std::span<const RankerSpec> rankers, const EmbeddingContext& ctx,
                              const DetectionConfig& cfg, int curve_step_percent) {
  auto injected = inject_errors(corpus, injection);
  return run_benchmark(injected.corpus, injected.truth, rankers, ctx, cfg, curve_step_percent);
}

void write_benchmark_table(std::ostream& out, const BenchmarkResult& result) {
  out << "method\tMAP\trecall@" << fixed(result.k_percent, 0);
  std::vector<std::string> classes;
  if (!result.rows.empty()) {
    for (const auto& [key, _] : result.rows.front().per_class_ap) classes.push_back(key);
  }
  for (const auto& c : classes) out << "\tAP:" << c;
  out << '\n';
  for (const auto& row : result.rows) {
    out << row.method << '\t' << fixed(row.map) << '\t' << fixed(row.recall_at_k);
    for (const auto& c : classes) {
      auto it = row.per_class_ap.find(c);
      out << '\t' << (it == row.per_class_ap.end() ? std::string("-") : fixed(it->second));
    }
    out << '\n';
  }
}

void write_curve(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "k\trecall\n";
  for (const auto& p : curve) out << fixed(p.k_percent, 1) << '\t' << fixed(p.recall) << '\n';
}

std::vector<CurvePoint> read_curve(std::istream& in) {
  std::vector<CurvePoint> curve;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    CurvePoint p;
    if (!(fields >> p.k_percent >> p.recall)) throw Error("malformed curve line: " + line);
    curve.push_back(p);
  }
  return curve;
}

void write_curve_svg(std::ostream& out, const std::map<std::string, std::vector<CurvePoint>>& curves) {
  constexpr double width = 640, height = 420, left = 60, right = 170, top = 20, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  static const char* const palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  auto px = [&](double k) { return left + plot_w * k / 100.0; };
  auto py = [&](double r) { return top + plot_h * (1.0 - r); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int t = 0; t <= 100; t += 20) {
    out << "<text x=\"" << px(t) << "\" y=\"" << height - bottom + 18
        << "\" text-anchor=\"middle\">" << t << "</text>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << py(t / 100.0) + 4 << "\" text-anchor=\"end\">"
        << fixed(t / 100.0, 1) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">% of ranked list (k)</text>\n";
  out << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">fraction of errors found</text>\n";
  std::size_t i = 0;
  for (const auto& [name, curve] : curves) {
    const char* color = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve) out << fixed(px(p.k_percent), 2) << ',' << fixed(py(p.recall), 2) << ' ';
    out << "\"/>\n";
    double ly = top + 14 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << width - right + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - right + 38 << "\" y=\"" << ly << "\">" << xml_escape(name)
        << "</text>\n";
    ++i;
  }
  out << "</svg>\n";
}

}  // namespace outlier

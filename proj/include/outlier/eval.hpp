#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "outlier/detect.hpp"
#include "outlier/text.hpp"

namespace outlier {

/// class key -> ids labeled as errors.
using ErrorGroundTruth = std::map<std::string, std::set<std::string>>;

// ---------------------------------------------------------------------------
// Artificial error injection

struct InjectionConfig {
  double p = 0.04;
  std::uint64_t seed = 0;

  void validate() const;
};

struct InjectionResult {
  LabeledCorpus corpus;
  ErrorGroundTruth truth;
};

/// Number of clones injected into a class of the given size: max(1, round(p * size)).
std::size_t injection_count(std::size_t class_size, double p);

/// For every class, clones injection_count(|X_i|, p) utterances drawn without
/// replacement from the other classes into it under fresh ids. Source classes
/// are unchanged; the clones are the ground-truth errors.
InjectionResult inject_errors(const LabeledCorpus& corpus, const InjectionConfig& cfg);

/// Ground truth file: one JSON object per line with `id` (class taken from the corpus).
ErrorGroundTruth read_ground_truth(std::istream& in, const LabeledCorpus& corpus,
                                   const std::string& source_name = "<stream>");

// ---------------------------------------------------------------------------
// Ranking quality

/// (1/|E|) * sum over error positions e of (errors at rank <= e) / e.
/// Throws Error for an empty error set or an error id missing from the list.
double average_precision(const RankedList& list, const std::set<std::string>& errors);

/// Fraction of errors within the first cutoff_count(n, k) entries.
double recall_at_k(const RankedList& list, const std::set<std::string>& errors, double k_percent);

struct CurvePoint {
  double k_percent = 0.0;
  double recall = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// recall_at_k at k = 0, step, ..., 100. step must divide 100.
std::vector<CurvePoint> recall_curve(const RankedList& list, const std::set<std::string>& errors,
                                     int step_percent);

struct EvalReport {
  std::string method;
  std::map<std::string, double> per_class_ap;
  std::vector<std::string> excluded_classes;  // no errors, left out of the mean
  double map = 0.0;
  /// Recall averaged over the evaluated classes.
  std::vector<CurvePoint> recall_curve;

  double recall_at(double k_percent) const;
};

/// Mean AP over classes with at least one error. Fills the recall curve at
/// the given step. Throws Error when no class has errors.
EvalReport mean_average_precision(const std::map<std::string, RankedList>& lists,
                                  const ErrorGroundTruth& truth, int curve_step_percent = 5);

// ---------------------------------------------------------------------------
// Benchmark

struct BenchmarkRow {
  std::string method;
  double map = 0.0;
  double recall_at_k = 0.0;
  std::map<std::string, double> per_class_ap;
};

struct BenchmarkResult {
  double k_percent = 10.0;
  std::vector<BenchmarkRow> rows;
  std::map<std::string, std::vector<CurvePoint>> curves;
};

/// Ranks every class with each ranker and scores the lists against the truth.
BenchmarkResult run_benchmark(const LabeledCorpus& corpus, const ErrorGroundTruth& truth,
                              std::span<const RankerSpec> rankers, const EmbeddingContext& ctx,
                              const DetectionConfig& cfg, int curve_step_percent = 5);

/// Injects errors with `injection` first, then benchmarks the injected corpus.
BenchmarkResult run_benchmark(const LabeledCorpus& corpus, const InjectionConfig& injection,
                              std::span<const RankerSpec> rankers, const EmbeddingContext& ctx,
                              const DetectionConfig& cfg, int curve_step_percent = 5);

/// Tab-separated: method, MAP, recall@k, then one AP column per class.
void write_benchmark_table(std::ostream& out, const BenchmarkResult& result);
/// Tab-separated k, recall rows.
void write_curve(std::ostream& out, const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> read_curve(std::istream& in);

/// Line chart of several recall curves as a standalone SVG document.
void write_curve_svg(std::ostream& out, const std::map<std::string, std::vector<CurvePoint>>& curves);

// ---------------------------------------------------------------------------
// N-gram diversity and coverage

struct MetricConfig {
  int max_n = 3;

  void validate() const;
};

/// 1 - (1/N') * sum_{n=1..N'} Jaccard(n-grams), N' = max(1, min(N, longer length));
/// the Jaccard index of two empty sets is 1.
double pair_distance(std::span<const std::string> a, std::span<const std::string> b,
                     const MetricConfig& cfg = {});
double pair_distance(const Utterance& a, const Utterance& b, const MetricConfig& cfg = {});

/// Mean over classes of the mean pairwise distance, self-pairs included.
double diversity(const LabeledCorpus& corpus, const MetricConfig& cfg = {});

/// Mean over classes of the mean, over test items, of the best similarity
/// (1 - D) to any training item of the same class. Class sets must match.
double coverage(const LabeledCorpus& train, const LabeledCorpus& test, const MetricConfig& cfg = {});

}  // namespace outlier

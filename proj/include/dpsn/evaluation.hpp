#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dpsn {

// Outer (or inner) fold per domain.
struct FoldAssignment {
  std::vector<std::string> ids;
  std::vector<int> fold;  // parallel to ids
  int folds = 5;
  std::uint64_t seed = 0;

  std::optional<int> fold_of(const std::string& id) const;
};

// Classes are visited in label order; within a class the members (in input
// order) are shuffled with SplitMix64(seed) and dealt round-robin, the deal
// continuing where the previous class stopped. Throws StratificationError if
// a class has fewer members than folds.
FoldAssignment stratified_folds(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                                int folds, std::uint64_t seed);

// Folds-file text: "domain_id,fold" lines under a header.
std::string write_folds_file(const FoldAssignment& folds);
FoldAssignment read_folds_file(const std::string& text);

struct PredictionRow {
  std::string domain_id;
  int fold = 0;
  std::string true_label;
  std::string predicted_label;
  std::vector<double> scores;

  bool operator==(const PredictionRow&) const = default;
};

struct PredictionSet {
  std::string method_id;
  std::string dataset_id;
  std::vector<PredictionRow> rows;
  double runtime_seconds = 0.0;
};

// dataset_id,method_id,domain_id,fold,true_label,predicted_label[,score_0,...]
std::string write_predictions_file(const PredictionSet& set);
// A file may hold several (dataset, method) groups; they come back in order
// of first appearance.
std::vector<PredictionSet> read_predictions_file(const std::string& text);

enum class MisclassificationMode { kAggregate, kAverage };

struct MisclassificationResult {
  double aggregate = 0.0;
  double average = 0.0;
  std::vector<double> per_fold;
  std::vector<std::size_t> fold_sizes;
  std::vector<std::size_t> fold_errors;

  double rate(MisclassificationMode mode) const {
    return mode == MisclassificationMode::kAggregate ? aggregate : average;
  }
};

// When `reference` is given, every assigned domain must appear exactly once
// with a matching fold (Error otherwise).
MisclassificationResult misclassification(const PredictionSet& preds, const FoldAssignment* reference = nullptr);

enum class RankPolicy { kStrict, kRelaxed };

struct RankSummary {
  std::size_t datasets = 0;
  std::size_t rank1_absolute = 0;
  std::size_t rank1_tied = 0;
  double percent_rank1() const;
  double percent_absolute() const;
  double percent_tied() const;
};

struct DatasetRates {
  std::string dataset_id;
  std::map<std::string, double> rates;  // method -> misclassification
};

struct RankTable {
  RankPolicy policy = RankPolicy::kStrict;
  double threshold = 0.0;
  std::vector<std::string> datasets;
  std::vector<std::map<std::string, int>> ranks;  // per dataset: method -> rank
  std::map<std::string, RankSummary> summary;
};

// rank(m) = 1 + #{m' : rate(m') < rate(m) - threshold}, threshold 0 for
// strict. Under relaxed ranking a method is rank 1 iff its rate is within the
// threshold of the dataset minimum.
RankTable rank_methods(const std::vector<DatasetRates>& rates, RankPolicy policy, double threshold = 0.02);

struct StatResult {
  std::string x_method;
  std::string y_method;
  double p = 1.0;
  double q = 1.0;
  std::size_t n_effective = 0;
  std::size_t zeros_discarded = 0;
  bool undefined = false;
  bool exact = false;
};

// One-sided paired Wilcoxon signed-rank test of "x < y". Zero differences are
// dropped, ties get average ranks; exact null distribution for n <= 25,
// otherwise normal approximation with tie and continuity correction.
// q = min(1, p * comparisons).
StatResult wilcoxon_one_sided(const std::vector<double>& x, const std::vector<double>& y, std::size_t comparisons);

double majority_baseline(const std::vector<std::string>& labels);

struct RuntimeSummary {
  double median = 0.0;
  double mean = 0.0;
  double stdev = 0.0;
  bool single_value = false;
  static double hours(double seconds) { return seconds / 3600.0; }
};

RuntimeSummary runtime_summary(const std::vector<double>& seconds);

}  // namespace dpsn

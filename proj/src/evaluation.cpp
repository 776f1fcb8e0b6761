#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/formats.hpp"

namespace dpsn {
namespace {

// Rates are ratios of small integers; differences that agree to this
// tolerance are treated as equal so float noise cannot break a tie.
constexpr double kRateTolerance = 1e-12;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw Error("field contains a separator: '" + s + "'");
}

}  // namespace

std::string write_predictions_file(const PredictionSet& set) {
  std::size_t score_cols = 0;
  for (const auto& r : set.rows) score_cols = std::max(score_cols, r.scores.size());
  std::string out = "dataset_id,method_id,domain_id,fold,true_label,predicted_label";
  for (std::size_t k = 0; k < score_cols; ++k) out += ",score_" + std::to_string(k);
  out += '\n';
  check_field(set.dataset_id);
  check_field(set.method_id);
  for (const auto& r : set.rows) {
    check_field(r.domain_id);
    check_field(r.true_label);
    check_field(r.predicted_label);
    out += set.dataset_id + ',' + set.method_id + ',' + r.domain_id + ',' + std::to_string(r.fold) + ',' +
           r.true_label + ',' + r.predicted_label;
    for (double s : r.scores) out += ',' + format_double(s);
    out += '\n';
  }
  return out;
}

std::vector<PredictionSet> read_predictions_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("dataset_id,method_id,domain_id,fold,true_label,predicted_label"))
    throw ParseError(1, "predictions header");
  if (!line.empty() && line.back() == '\r') throw ParseError(1, "predictions file must use LF line endings");
  std::vector<PredictionSet> sets;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 6) throw ParseError(line_no, "expected at least 6 columns");
    PredictionRow row;
    row.domain_id = cells[2];
    try {
      row.fold = std::stoi(cells[3]);
      for (std::size_t k = 6; k < cells.size(); ++k) row.scores.push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad numeric field");
    }
    row.true_label = cells[4];
    row.predicted_label = cells[5];
    auto it = std::find_if(sets.begin(), sets.end(), [&](const PredictionSet& s) {
      return s.dataset_id == cells[0] && s.method_id == cells[1];
    });
    if (it == sets.end()) {
      sets.push_back({cells[1], cells[0], {}, 0.0});
      it = std::prev(sets.end());
    }
    it->rows.push_back(std::move(row));
  }
  return sets;
}

MisclassificationResult misclassification(const PredictionSet& preds, const FoldAssignment* reference) {
  if (preds.rows.empty()) throw Error("no predictions for method " + preds.method_id);
  if (reference) {
    std::map<std::string, int> expected;
    for (std::size_t i = 0; i < reference->ids.size(); ++i) expected[reference->ids[i]] = reference->fold[i];
    std::set<std::string> seen;
    for (const auto& r : preds.rows) {
      auto it = expected.find(r.domain_id);
      if (it == expected.end()) throw Error("prediction for unknown domain " + r.domain_id);
      if (it->second != r.fold) throw Error("fold mismatch for domain " + r.domain_id);
      if (!seen.insert(r.domain_id).second) throw Error("duplicate prediction for domain " + r.domain_id);
    }
    for (const auto& [id, fold] : expected)
      if (!seen.count(id)) throw Error("incomplete predictions: missing domain " + id);
  }

  int folds = 0;
  for (const auto& r : preds.rows) {
    if (r.fold < 0) throw Error("negative fold index");
    folds = std::max(folds, r.fold + 1);
  }
  if (reference) folds = std::max(folds, reference->folds);
  MisclassificationResult out;
  out.fold_sizes.assign(folds, 0);
  out.fold_errors.assign(folds, 0);
  std::size_t wrong = 0;
  for (const auto& r : preds.rows) {
    ++out.fold_sizes[r.fold];
    if (r.predicted_label != r.true_label) {
      ++out.fold_errors[r.fold];
      ++wrong;
    }
  }
  out.aggregate = static_cast<double>(wrong) / static_cast<double>(preds.rows.size());
  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    const double rate = out.fold_sizes[f] ? static_cast<double>(out.fold_errors[f]) / out.fold_sizes[f] : 0.0;
    out.per_fold.push_back(rate);
    if (out.fold_sizes[f]) {
      sum += rate;
      ++used;
    }
  }
  out.average = sum / used;
  return out;
}

double RankSummary::percent_rank1() const {
  return datasets ? 100.0 * static_cast<double>(rank1_absolute + rank1_tied) / datasets : 0.0;
}
double RankSummary::percent_absolute() const {
  return datasets ? 100.0 * static_cast<double>(rank1_absolute) / datasets : 0.0;
}
double RankSummary::percent_tied() const {
  return datasets ? 100.0 * static_cast<double>(rank1_tied) / datasets : 0.0;
}

RankTable rank_methods(const std::vector<DatasetRates>& rates, RankPolicy policy, double threshold) {
  RankTable table;
  table.policy = policy;
  table.threshold = policy == RankPolicy::kStrict ? 0.0 : threshold;
  if (table.threshold < 0) throw PreconditionError("relaxed threshold must be >= 0");
  for (const auto& ds : rates) {
    if (ds.rates.size() < 2) throw PreconditionError("dataset " + ds.dataset_id + " ranks fewer than 2 methods");
    std::map<std::string, int> ranks;
    for (const auto& [m, r] : ds.rates) {
      int better = 0;
      for (const auto& [m2, r2] : ds.rates)
        if (r2 < r - table.threshold - kRateTolerance) ++better;
      ranks[m] = 1 + better;
    }
    const auto firsts = std::count_if(ranks.begin(), ranks.end(), [](const auto& kv) { return kv.second == 1; });
    for (const auto& [m, rank] : ranks) {
      auto& s = table.summary[m];
      ++s.datasets;
      if (rank == 1) (firsts == 1 ? s.rank1_absolute : s.rank1_tied)++;
    }
    table.datasets.push_back(ds.dataset_id);
    table.ranks.push_back(std::move(ranks));
  }
  return table;
}

double majority_baseline(const std::vector<std::string>& labels) {
  if (labels.empty()) throw PreconditionError("majority baseline needs labels");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  std::size_t largest = 0;
  for (const auto& [l, n] : counts) largest = std::max(largest, n);
  return 1.0 - static_cast<double>(largest) / static_cast<double>(labels.size());
}

RuntimeSummary runtime_summary(const std::vector<double>& seconds) {
  if (seconds.empty()) throw PreconditionError("runtime summary needs at least one value");
  RuntimeSummary s;
  auto sorted = seconds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n == 1) {
    s.single_value = true;
    return s;
  }
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.stdev = std::sqrt(ss / static_cast<double>(n - 1));
  return s;
}

}  // namespace dpsn
